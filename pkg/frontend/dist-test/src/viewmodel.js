/** Pure view-model logic for the review screen; no DOM access here.
 *
 * The save/accept gating is the UI-side enforcement of "never persist a
 * formula the service did not validate": buttons stay disabled until the
 * latest server-side validation of the edited text has succeeded, and an
 * accept is only offered for the winner's own formula.
 */
export function buildReviewViewModel(response) {
    const candidates = response.candidates.map((c) => toCandidateView(c, response));
    const voteRows = Object.entries(response.vote_tally)
        .map(([form, count]) => ({ form, count }))
        .sort((a, b) => b.count - a.count || a.form.localeCompare(b.form));
    const unparsedCount = response.candidates.filter((c) => c.parse_error !== null).length;
    return {
        reviewId: response.review_id,
        ruleId: response.rule_id,
        ruleText: response.rule_text,
        winner: response.winner,
        candidates,
        voteRows,
        unparsedCount,
        sampleCount: response.candidates.length,
    };
}
function toCandidateView(c, response) {
    return {
        sampleIndex: c.sample_index,
        formula: c.formula,
        canonical: c.canonical,
        parseError: c.parse_error,
        voteCount: c.canonical !== null ? (response.vote_tally[c.canonical] ?? 0) : 0,
        isWinner: response.winner_index === c.sample_index,
        vocabViolations: c.vocab_violations,
        propositionMap: c.proposition_map,
        rawOutput: c.raw_output,
    };
}
/** Displayed votes plus unparsed samples always account for every sample. */
export function voteCountsConsistent(vm) {
    const voted = vm.voteRows.reduce((sum, row) => sum + row.count, 0);
    return voted + vm.unparsedCount === vm.sampleCount;
}
/** Decide which review actions are allowed for the current editor state. */
export function decisionGate(input) {
    if (input.busy) {
        return { canAccept: false, canSaveEdit: false, canReject: false, reason: "working…" };
    }
    const trimmed = input.editedText.trim();
    const untouched = input.winner !== null && trimmed === input.winner;
    if (untouched) {
        return {
            canAccept: true,
            canSaveEdit: false,
            canReject: true,
            reason: "formula matches the winning translation",
        };
    }
    if (input.validation.kind === "valid" && input.validation.formula !== input.winner) {
        return {
            canAccept: false,
            canSaveEdit: true,
            canReject: true,
            reason: "edited formula validated by the service",
        };
    }
    if (input.validation.kind === "valid") {
        // Validated text that prints back to the winner's formula is an accept.
        return {
            canAccept: true,
            canSaveEdit: false,
            canReject: true,
            reason: "formula is equivalent to the winning translation",
        };
    }
    const reason = input.validation.kind === "invalid"
        ? offsetMessage(input.validation.message, input.validation.offset)
        : input.validation.kind === "pending"
            ? "validating…"
            : input.winner === null
                ? "no winning translation; edit the formula or reject"
                : "formula not validated yet";
    return { canAccept: false, canSaveEdit: false, canReject: true, reason };
}
export function offsetMessage(message, offset) {
    return offset === undefined ? message : `${message} (offset ${offset})`;
}
/** Caret line pointing at a byte offset, for monospace error display. */
export function caretLine(text, offset) {
    const clamped = Math.max(0, Math.min(offset, text.length));
    return " ".repeat(clamped) + "^";
}
