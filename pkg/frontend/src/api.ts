/** Typed client for the rulebench service; all failures become ApiError. */

import type {
  ErrorBody,
  MonitorResponse,
  ParseResponse,
  PredicateInfo,
  ReviewDecision,
  ReviewEntryPayload,
  ReviewStatus,
  ReviewSummary,
  TraceDocument,
  TranslateResponse,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly offset?: number;

  constructor(status: number, body: ErrorBody) {
    super(body.message);
    this.status = status;
    this.code = body.code;
    this.offset = body.offset;
  }
}

async function toError(response: Response): Promise<ApiError> {
  let body: ErrorBody;
  try {
    body = (await response.json()) as ErrorBody;
  } catch {
    body = { code: "unknown", message: `request failed with status ${response.status}` };
  }
  return new ApiError(response.status, body);
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(base = "", fetchFn?: FetchLike) {
    this.base = base.replace(/\/$/, "");
    const fallback = globalThis.fetch.bind(globalThis) as FetchLike;
    this.fetchFn = fetchFn ?? fallback;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(`${this.base}${path}`, init);
    if (!response.ok) {
      throw await toError(response);
    }
    return (await response.json()) as T;
  }

  parse(formula: string): Promise<ParseResponse> {
    return this.request("POST", "/api/parse", { formula });
  }

  translate(
    ruleText: string,
    options: { mode?: "plain" | "cot"; samples?: number; ruleId?: string } = {},
  ): Promise<TranslateResponse> {
    const body: Record<string, unknown> = { rule_text: ruleText };
    if (options.mode !== undefined) body.mode = options.mode;
    if (options.samples !== undefined) body.samples = options.samples;
    if (options.ruleId !== undefined) body.rule_id = options.ruleId;
    return this.request("POST", "/api/translate", body);
  }

  listReviews(status?: ReviewStatus): Promise<ReviewSummary[]> {
    const suffix = status ? `?status=${encodeURIComponent(status)}` : "";
    return this.request<{ reviews: ReviewSummary[] }>("GET", `/api/reviews${suffix}`).then(
      (payload) => payload.reviews,
    );
  }

  getReview(reviewId: string): Promise<ReviewEntryPayload> {
    return this.request("GET", `/api/reviews/${encodeURIComponent(reviewId)}`);
  }

  decideReview(reviewId: string, decision: ReviewDecision): Promise<ReviewEntryPayload> {
    return this.request("POST", `/api/reviews/${encodeURIComponent(reviewId)}`, decision);
  }

  monitor(formula: string, trace: TraceDocument): Promise<MonitorResponse> {
    return this.request("POST", "/api/monitor", { formula, trace });
  }

  predicates(): Promise<PredicateInfo[]> {
    return this.request<{ predicates: PredicateInfo[] }>("GET", "/api/predicates").then(
      (payload) => payload.predicates,
    );
  }
}
