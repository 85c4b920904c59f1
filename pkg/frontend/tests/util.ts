import { readFileSync } from "node:fs";
import { join } from "node:path";

export function fixture<T>(name: string): T {
  const path = join(process.cwd(), "tests", "fixtures", name);
  return JSON.parse(readFileSync(path, "utf-8")) as T;
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/** A scripted fetch: each call consumes the next (matcher, response) entry. */
export function scriptedFetch(
  script: Array<[RegExp, () => Response]>,
): { fetchFn: (input: string, init?: RequestInit) => Promise<Response>; calls: Array<{ url: string; init?: RequestInit }> } {
  const calls: Array<{ url: string; init?: RequestInit }> = [];
  let index = 0;
  return {
    calls,
    fetchFn: async (url: string, init?: RequestInit) => {
      calls.push({ url, init });
      if (index >= script.length) throw new Error(`unexpected fetch #${index}: ${url}`);
      const [matcher, make] = script[index];
      index += 1;
      if (!matcher.test(url)) throw new Error(`fetch #${index - 1} ${url} does not match ${matcher}`);
      return make();
    },
  };
}
