import { readFileSync } from "node:fs";
import { join } from "node:path";
export function fixture(name) {
    const path = join(process.cwd(), "tests", "fixtures", name);
    return JSON.parse(readFileSync(path, "utf-8"));
}
export function jsonResponse(body, status = 200) {
    return new Response(JSON.stringify(body), {
        status,
        headers: { "Content-Type": "application/json" },
    });
}
/** A scripted fetch: each call consumes the next (matcher, response) entry. */
export function scriptedFetch(script) {
    const calls = [];
    let index = 0;
    return {
        calls,
        fetchFn: async (url, init) => {
            calls.push({ url, init });
            if (index >= script.length)
                throw new Error(`unexpected fetch #${index}: ${url}`);
            const [matcher, make] = script[index];
            index += 1;
            if (!matcher.test(url))
                throw new Error(`fetch #${index - 1} ${url} does not match ${matcher}`);
            return make();
        },
    };
}
