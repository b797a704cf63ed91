/** Drives the real service (replay provider) through the UI's own layers:
 * submit -> inspect -> edit-with-invalid-formula (save stays disabled, error
 * carries the offset) -> accept -> queue updated. The gate is consulted
 * before every write, so the UI never issues a review write the service
 * would reject.
 */
import assert from "node:assert/strict";
import { after, before, test } from "node:test";
import { spawn } from "node:child_process";
import { createHash } from "node:crypto";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { ApiClient, ApiError } from "../src/api.js";
import { buildReviewViewModel, decisionGate, voteCountsConsistent } from "../src/viewmodel.js";
const RULE_TEXT = "Ego vehicle will not exceed the speed limit of the lane it is driving on and " +
    "will not exceed the maximum velocity allowed for its vehicle type.";
const WINNER = "G(keep_lane_speed_limit(ego) & keep_vehicle_type_limit(ego))";
function deriveRuleId(ruleText) {
    const normalized = ruleText.split(/\s+/).filter(Boolean).join(" ");
    const digest = createHash("sha256").update(normalized, "utf-8").digest("hex");
    return `rule-${digest.slice(0, 12)}`;
}
function fixtureLines(ruleId) {
    const records = [
        {
            rule_id: ruleId,
            sample_index: 0,
            raw_output: "THOUGHTS:\n1. Both limits apply at every time step.\n" +
                "PROPOSITIONS:\nlane speed limit => keep_lane_speed_limit(ego)\n" +
                "vehicle type limit => keep_vehicle_type_limit(ego)\n" +
                "END_PROPOSITIONS\n" +
                `FINAL_MTL: ${WINNER}`,
        },
        {
            rule_id: ruleId,
            sample_index: 1,
            raw_output: "FINAL_MTL: G(keep_vehicle_type_limit(ego) & keep_lane_speed_limit(ego))",
        },
        {
            rule_id: ruleId,
            sample_index: 2,
            raw_output: "FINAL_MTL: F(keep_lane_speed_limit(ego))",
        },
        { rule_id: ruleId, sample_index: 3, raw_output: "Sorry, no formula this time." },
        { rule_id: ruleId, sample_index: 4, raw_output: `FINAL_MTL: ${WINNER}` },
    ];
    return records.map((r) => JSON.stringify(r)).join("\n") + "\n";
}
let child = null;
let api;
async function waitForService(base, timeoutMs = 20000) {
    const deadline = Date.now() + timeoutMs;
    let lastError = null;
    while (Date.now() < deadline) {
        try {
            const response = await fetch(`${base}/api/predicates`);
            if (response.ok)
                return;
        }
        catch (error) {
            lastError = error;
        }
        await new Promise((resolveSleep) => setTimeout(resolveSleep, 250));
    }
    throw new Error(`service did not come up: ${lastError}`);
}
before(async () => {
    const workdir = mkdtempSync(join(tmpdir(), "rulebench-ui-"));
    const fixturePath = join(workdir, "fixture.jsonl");
    writeFileSync(fixturePath, fixtureLines(deriveRuleId(RULE_TEXT)), "utf-8");
    const port = 18000 + Math.floor(Math.random() * 20000);
    const base = `http://127.0.0.1:${port}`;
    const repoRoot = resolve(process.cwd(), "..");
    child = spawn("python3", [
        "-m", "rulebench.cli",
        "serve",
        "--port", String(port),
        "--store", join(workdir, "store"),
        "--provider", "replay",
        "--fixtures", fixturePath,
    ], {
        cwd: repoRoot,
        env: { ...process.env, PYTHONPATH: join(repoRoot, "src") },
        stdio: ["ignore", "pipe", "pipe"],
    });
    child.stderr?.on("data", () => undefined);
    await waitForService(base);
    api = new ApiClient(base);
});
after(() => {
    child?.kill("SIGTERM");
});
test("submit -> inspect -> invalid edit blocked -> accept -> queue updated", async () => {
    // submit
    const response = await api.translate(RULE_TEXT, { mode: "cot", samples: 5 });
    const vm = buildReviewViewModel(response);
    // inspect: winner badged, reasoning and propositions visible, votes add up
    assert.equal(vm.winner, WINNER);
    assert.ok(voteCountsConsistent(vm));
    const winnerCard = vm.candidates.find((c) => c.isWinner);
    assert.ok(winnerCard);
    assert.equal(winnerCard.voteCount, 3);
    assert.ok(winnerCard.rawOutput.includes("THOUGHTS:"));
    assert.deepEqual(winnerCard.propositionMap[0], [
        "lane speed limit",
        "keep_lane_speed_limit(ego)",
    ]);
    assert.equal(vm.unparsedCount, 1);
    // edit with an invalid formula: server-side validation reports the offset
    const broken = "G(keep_lane_speed_limit(ego)";
    let offset;
    try {
        await api.parse(broken);
        assert.fail("expected a parse error");
    }
    catch (error) {
        assert.ok(error instanceof ApiError);
        assert.equal(error.status, 400);
        offset = error.offset;
    }
    assert.equal(offset, broken.length);
    const blockedGate = decisionGate({
        winner: vm.winner,
        editedText: broken,
        validation: { kind: "invalid", message: "unexpected end of input", offset },
        busy: false,
    });
    assert.equal(blockedGate.canSaveEdit, false, "save must stay disabled");
    assert.equal(blockedGate.canAccept, false);
    // accept the winner (gate allows it for the untouched winner text)
    const acceptGate = decisionGate({
        winner: vm.winner,
        editedText: vm.winner ?? "",
        validation: { kind: "idle" },
        busy: false,
    });
    assert.equal(acceptGate.canAccept, true);
    const accepted = await api.decideReview(vm.reviewId, {
        status: "accepted",
        final_mtl: vm.winner ?? undefined,
    });
    assert.equal(accepted.status, "accepted");
    assert.equal(accepted.final_mtl, WINNER);
    // queue reflects the new status without any reload magic
    const acceptedRows = await api.listReviews("accepted");
    assert.deepEqual(acceptedRows.map((r) => r.review_id), [vm.reviewId]);
    const pendingRows = await api.listReviews("pending");
    assert.equal(pendingRows.length, 0);
    // the accepted formula can drive the monitor tab
    const verdict = await api.monitor(WINNER, {
        states: [
            ["keep_lane_speed_limit(ego)", "keep_vehicle_type_limit(ego)"],
            ["keep_lane_speed_limit(ego)", "keep_vehicle_type_limit(ego)"],
        ],
    });
    assert.equal(verdict.holds, true);
    const violating = await api.monitor(WINNER, {
        states: [["keep_lane_speed_limit(ego)", "keep_vehicle_type_limit(ego)"], []],
    });
    assert.equal(violating.holds, false);
    assert.equal(violating.violation_position, 1);
});
test("service rejections the gate prevents are real rejections", async () => {
    // Submit a fresh entry, then bypass the gate on purpose: the service must
    // reject what the gate would have blocked, proving the gate mirrors it.
    const response = await api.translate(RULE_TEXT, { mode: "plain", samples: 5 });
    await assert.rejects(api.decideReview(response.review_id, { status: "edited", final_mtl: "G(p" }), (error) => error instanceof ApiError && error.status === 400 && error.offset !== undefined);
    // entry is still pending, so a legal decision still works afterwards
    const rejected = await api.decideReview(response.review_id, {
        status: "rejected",
        note: "duplicate entry",
    });
    assert.equal(rejected.status, "rejected");
    // terminal: any further decision is a 409 the UI surfaces inline
    await assert.rejects(api.decideReview(response.review_id, { status: "accepted" }), (error) => error instanceof ApiError && error.status === 409);
});
