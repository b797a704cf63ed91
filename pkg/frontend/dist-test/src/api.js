/** Typed client for the rulebench service; all failures become ApiError. */
export class ApiError extends Error {
    status;
    code;
    offset;
    constructor(status, body) {
        super(body.message);
        this.status = status;
        this.code = body.code;
        this.offset = body.offset;
    }
}
async function toError(response) {
    let body;
    try {
        body = (await response.json());
    }
    catch {
        body = { code: "unknown", message: `request failed with status ${response.status}` };
    }
    return new ApiError(response.status, body);
}
export class ApiClient {
    base;
    fetchFn;
    constructor(base = "", fetchFn) {
        this.base = base.replace(/\/$/, "");
        const fallback = globalThis.fetch.bind(globalThis);
        this.fetchFn = fetchFn ?? fallback;
    }
    async request(method, path, body) {
        const init = { method };
        if (body !== undefined) {
            init.headers = { "Content-Type": "application/json" };
            init.body = JSON.stringify(body);
        }
        const response = await this.fetchFn(`${this.base}${path}`, init);
        if (!response.ok) {
            throw await toError(response);
        }
        return (await response.json());
    }
    parse(formula) {
        return this.request("POST", "/api/parse", { formula });
    }
    translate(ruleText, options = {}) {
        const body = { rule_text: ruleText };
        if (options.mode !== undefined)
            body.mode = options.mode;
        if (options.samples !== undefined)
            body.samples = options.samples;
        if (options.ruleId !== undefined)
            body.rule_id = options.ruleId;
        return this.request("POST", "/api/translate", body);
    }
    listReviews(status) {
        const suffix = status ? `?status=${encodeURIComponent(status)}` : "";
        return this.request("GET", `/api/reviews${suffix}`).then((payload) => payload.reviews);
    }
    getReview(reviewId) {
        return this.request("GET", `/api/reviews/${encodeURIComponent(reviewId)}`);
    }
    decideReview(reviewId, decision) {
        return this.request("POST", `/api/reviews/${encodeURIComponent(reviewId)}`, decision);
    }
    monitor(formula, trace) {
        return this.request("POST", "/api/monitor", { formula, trace });
    }
    predicates() {
        return this.request("GET", "/api/predicates").then((payload) => payload.predicates);
    }
}
