/**
 * Client for the allocation service's four endpoints.
 *
 * Every number the console shows comes out of these payloads untouched;
 * the console never recomputes a score.
 */
export class ServiceError extends Error {
    constructor(status, message) {
        super(message);
        this.status = status;
    }
}
export class ApiClient {
    constructor(baseUrl = "", fetchFn = (input, init) => fetch(input, init)) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
    }
    async request(path, init) {
        let response;
        try {
            response = await this.fetchFn(this.baseUrl + path, init);
        }
        catch (err) {
            throw new ServiceError(0, `service unreachable: ${String(err)}`);
        }
        if (!response.ok) {
            let detail = response.statusText;
            try {
                const body = await response.json();
                if (body && typeof body.detail === "string")
                    detail = body.detail;
            }
            catch {
                /* non-JSON error body */
            }
            throw new ServiceError(response.status, detail);
        }
        return (await response.json());
    }
    regions() {
        return this.request("/regions");
    }
    score(req) {
        return this.request("/score", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(req),
        });
    }
    submitJob(req) {
        return this.request("/jobs", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(req),
        });
    }
    pollJob(jobId) {
        return this.request(`/jobs/${jobId}`);
    }
    /** Poll every `intervalMs` until the job leaves queued/running. */
    async pollUntilDone(jobId, onProgress, intervalMs = 1000, sleep = (ms) => new Promise((r) => setTimeout(r, ms))) {
        for (;;) {
            const job = await this.pollJob(jobId);
            if (onProgress)
                onProgress(job);
            if (job.state === "done" || job.state === "failed")
                return job;
            await sleep(intervalMs);
        }
    }
}
