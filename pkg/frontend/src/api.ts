/**
 * Client for the allocation service's four endpoints.
 *
 * Every number the console shows comes out of these payloads untouched;
 * the console never recomputes a score.
 */

export interface RegionDescriptor {
  id: string;
  name: string;
  m: number;
  n: number;
  site_types: number[];
}

export interface Scores {
  coverage: number;
  d_optimality: number | string | null;
  equity: number;
  combined: number;
}

export interface EquityGroup {
  combo: string[];
  conditional: number;
  squared_deviation: number;
}

export interface MapArea {
  id: string;
  x: number;
  y: number;
  population: number;
  covered: number;
}

export interface MapSite {
  id: string;
  x: number;
  y: number;
  site_type: number;
  capacity: number;
  selected: number;
}

export interface ScoreReport {
  schema: number;
  kind: string;
  created: string;
  region: { m: number; n: number; total_population: number };
  config: Record<string, unknown>;
  allocation: { site_ids: string[]; site_indices: number[] };
  scores: Scores;
  equity_breakdown: { marginal: number; total: number; groups: EquityGroup[] };
  map: { areas: MapArea[]; sites: MapSite[] };
}

export interface SolveReport {
  schema: number;
  kind: string;
  result: { site_ids: string[]; site_indices: number[]; scores: Scores };
  trace: number[];
  evaluations: number;
  interrupted: boolean;
}

export interface Job {
  id: string;
  region_id: string;
  state: "queued" | "running" | "done" | "failed";
  progress: { generation: number; best_combined: number | null };
  config: Record<string, unknown>;
  result: SolveReport | null;
  error: string | null;
}

export interface ScoreRequest {
  region_id: string;
  site_ids: string[];
  k?: number;
  lambda1?: number;
  lambda2?: number;
  lambda3?: number;
  target_fraction?: number;
  seed?: number;
}

export interface JobRequest extends Omit<ScoreRequest, "site_ids"> {
  population?: number;
  generations?: number;
}

export class ServiceError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      throw new ServiceError(0, `service unreachable: ${String(err)}`);
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ServiceError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  regions(): Promise<RegionDescriptor[]> {
    return this.request<RegionDescriptor[]>("/regions");
  }

  score(req: ScoreRequest): Promise<ScoreReport> {
    return this.request<ScoreReport>("/score", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  submitJob(req: JobRequest & { region_id: string }): Promise<{ job_id: string }> {
    return this.request<{ job_id: string }>("/jobs", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  pollJob(jobId: string): Promise<Job> {
    return this.request<Job>(`/jobs/${jobId}`);
  }

  /** Poll every `intervalMs` until the job leaves queued/running. */
  async pollUntilDone(
    jobId: string,
    onProgress?: (job: Job) => void,
    intervalMs = 1000,
    sleep: (ms: number) => Promise<void> = (ms) => new Promise((r) => setTimeout(r, ms)),
  ): Promise<Job> {
    for (;;) {
      const job = await this.pollJob(jobId);
      if (onProgress) onProgress(job);
      if (job.state === "done" || job.state === "failed") return job;
      await sleep(intervalMs);
    }
  }
}
