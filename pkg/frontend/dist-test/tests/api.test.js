import assert from "node:assert/strict";
import { test } from "node:test";
import { ApiClient, ApiError } from "../src/api.js";
function stubFetch(responder) {
    const calls = [];
    const fetchFn = async (url, init) => {
        calls.push({
            url,
            method: init?.method ?? "GET",
            body: init?.body ? JSON.parse(init.body) : undefined,
        });
        const { status, body } = responder(url, init);
        return new Response(JSON.stringify(body), {
            status,
            headers: { "Content-Type": "application/json" },
        });
    };
    return { fetchFn, calls };
}
test("parse posts the formula and returns the canonical form", async () => {
    const { fetchFn, calls } = stubFetch(() => ({
        status: 200,
        body: { formula: "G(p)", canonical: "G(p)" },
    }));
    const api = new ApiClient("", fetchFn);
    const result = await api.parse("G(p)");
    assert.equal(result.canonical, "G(p)");
    assert.deepEqual(calls[0], {
        url: "/api/parse",
        method: "POST",
        body: { formula: "G(p)" },
    });
});
test("translate sends optional fields only when given", async () => {
    const { fetchFn, calls } = stubFetch(() => ({ status: 200, body: {} }));
    const api = new ApiClient("http://svc:8000", fetchFn);
    await api.translate("rule text");
    await api.translate("rule text", { mode: "plain", samples: 3, ruleId: "r1" });
    assert.deepEqual(calls[0]?.body, { rule_text: "rule text" });
    assert.deepEqual(calls[1]?.body, {
        rule_text: "rule text",
        mode: "plain",
        samples: 3,
        rule_id: "r1",
    });
    assert.equal(calls[1]?.url, "http://svc:8000/api/translate");
});
test("service errors become ApiError with code and offset", async () => {
    const { fetchFn } = stubFetch(() => ({
        status: 400,
        body: { code: "parse_error", message: "unexpected end of input", offset: 3 },
    }));
    const api = new ApiClient("", fetchFn);
    await assert.rejects(api.parse("G(p"), (error) => {
        assert.ok(error instanceof ApiError);
        assert.equal(error.status, 400);
        assert.equal(error.code, "parse_error");
        assert.equal(error.offset, 3);
        assert.match(error.message, /unexpected end of input/);
        return true;
    });
});
test("non-json error bodies still raise a usable ApiError", async () => {
    const fetchFn = async () => new Response("boom", { status: 500 });
    const api = new ApiClient("", fetchFn);
    await assert.rejects(api.predicates(), (error) => error instanceof ApiError && error.status === 500);
});
test("review listing unwraps the envelope and encodes the filter", async () => {
    const { fetchFn, calls } = stubFetch(() => ({
        status: 200,
        body: { reviews: [{ review_id: "r1" }] },
    }));
    const api = new ApiClient("", fetchFn);
    const reviews = await api.listReviews("accepted");
    assert.equal(reviews.length, 1);
    assert.equal(calls[0]?.url, "/api/reviews?status=accepted");
});
test("review decisions post status, formula, and note", async () => {
    const { fetchFn, calls } = stubFetch(() => ({ status: 200, body: { status: "edited" } }));
    const api = new ApiClient("", fetchFn);
    await api.decideReview("rev9", { status: "edited", final_mtl: "G(p)", note: "tightened" });
    assert.equal(calls[0]?.url, "/api/reviews/rev9");
    assert.deepEqual(calls[0]?.body, { status: "edited", final_mtl: "G(p)", note: "tightened" });
});
test("monitor posts the formula with the inline trace document", async () => {
    const { fetchFn, calls } = stubFetch(() => ({
        status: 200,
        body: { holds: true, at_position: 0, formula: "G(p)", violation_position: null },
    }));
    const api = new ApiClient("", fetchFn);
    const verdict = await api.monitor("G(p)", { states: [["p"], ["p"]] });
    assert.equal(verdict.holds, true);
    assert.deepEqual(calls[0]?.body, { formula: "G(p)", trace: { states: [["p"], ["p"]] } });
});
