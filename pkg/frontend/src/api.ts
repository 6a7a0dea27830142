// Typed client for the tagmax HTTP API.
//
// Every number the UI displays originates in one of these responses;
// the client never computes scores itself. An optional listener sees
// each parsed response, which the tests use to check that rule.

export interface HealthInfo {
  status: string;
  backend: string;
  model_loaded: boolean;
}

export interface ModelInfo {
  format: string;
  version: number;
  n: number;
  m: number;
  r: number;
  attributes: string[];
  tags: string[];
  prevalence: Record<string, number>;
  smoothing: { m_weight: number; prior_mode: string };
  naive_attr_cap: number;
  backend: string;
}

export type Polarity = "desirable" | "undesirable";

export interface TagSpec {
  name: string;
  weight: number;
  polarity: Polarity;
}

export interface SolveRequest {
  algo: string;
  tags: Array<string | TagSpec>;
  k: number;
  mprime?: number;
  epsilon?: number;
  sigma?: number;
  zprime?: number;
  restarts?: number;
  max_steps?: number;
  seed?: number;
}

export interface ResultEntry {
  bits: string;
  score: number;
  tag_scores: number[];
  per_tag: number[];
}

export interface SolverStats {
  algorithm: string;
  candidates_examined: number;
  iterations: number;
  wall_time: number;
  detail: Record<string, unknown>;
}

export interface SolveResponse {
  algo: string;
  k: number;
  entries: ResultEntry[];
  stats: SolverStats;
}

export interface ScoreRequest {
  tags: Array<string | TagSpec>;
  bits: string;
  k?: number;
}

export interface PerTagScore {
  name: string;
  weight: number;
  polarity: string;
  tag_score: number;
  contribution: number;
}

export interface ScoreResponse {
  bits: string;
  score: number;
  per_tag: PerTagScore[];
  rank?: number;
  total?: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

export type ResponseListener = (route: string, payload: unknown) => void;

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly onResponse?: ResponseListener,
  ) {}

  health(): Promise<HealthInfo> {
    return this.request<HealthInfo>("/health");
  }

  model(): Promise<ModelInfo> {
    return this.request<ModelInfo>("/model");
  }

  solve(req: SolveRequest, signal?: AbortSignal): Promise<SolveResponse> {
    return this.post<SolveResponse>("/solve", req, signal);
  }

  score(req: ScoreRequest, signal?: AbortSignal): Promise<ScoreResponse> {
    return this.post<ScoreResponse>("/score", req, signal);
  }

  private post<T>(route: string, body: unknown, signal?: AbortSignal): Promise<T> {
    return this.request<T>(route, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
  }

  private async request<T>(route: string, init?: RequestInit): Promise<T> {
    let res: Response;
    try {
      res = await fetch(this.base + route, init);
    } catch (err) {
      if (err instanceof Error && err.name === "AbortError") {
        throw err; // cancellation is control flow, not an API failure
      }
      throw new ApiError(0, `service unreachable: ${String(err)}`);
    }
    const payload = await res.json().catch(() => null);
    if (!res.ok) {
      const detail =
        payload && typeof (payload as { detail?: unknown }).detail === "string"
          ? (payload as { detail: string }).detail
          : `${res.status} ${res.statusText}`;
      throw new ApiError(res.status, detail);
    }
    if (payload === null) {
      throw new ApiError(res.status, `invalid JSON from ${route}`);
    }
    this.onResponse?.(route, payload);
    return payload as T;
  }
}
