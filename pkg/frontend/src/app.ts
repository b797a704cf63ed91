/** Single-page review app: submit rules, inspect candidates, decide, monitor. */

import { ApiClient, ApiError } from "./api.js";
import type {
  MonitorResponse,
  ReviewStatus,
  ReviewSummary,
  TraceDocument,
  TranslateResponse,
} from "./types.js";
import { FormulaValidator } from "./validation.js";
import {
  buildReviewViewModel,
  caretLine,
  decisionGate,
  offsetMessage,
  type GateInput,
  type ReviewViewModel,
  type ValidationState,
} from "./viewmodel.js";

const api = new ApiClient("");

interface AppState {
  tab: "translate" | "queue" | "monitor";
  busy: boolean;
  banner: string | null;
  current: ReviewViewModel | null;
  currentStatus: ReviewStatus | null;
  editedText: string;
  note: string;
  validation: ValidationState;
  queue: ReviewSummary[];
  queueFilter: ReviewStatus | "all";
  monitorResult: MonitorResponse | null;
  monitorError: string | null;
}

const state: AppState = {
  tab: "translate",
  busy: false,
  banner: null,
  current: null,
  currentStatus: null,
  editedText: "",
  note: "",
  validation: { kind: "idle" },
  queue: [],
  queueFilter: "all",
  monitorResult: null,
  monitorError: null,
};

const validator = new FormulaValidator(api, (validation) => {
  state.validation = validation;
  renderDecisionControls();
});

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setBanner(message: string | null): void {
  state.banner = message;
  const banner = byId<HTMLDivElement>("banner");
  banner.textContent = message ?? "";
  banner.classList.toggle("hidden", message === null);
}

function describeError(error: unknown): string {
  if (error instanceof ApiError) {
    return offsetMessage(`${error.code}: ${error.message}`, error.offset);
  }
  return error instanceof Error ? error.message : String(error);
}

// --- tabs ---------------------------------------------------------------------

function switchTab(tab: AppState["tab"]): void {
  state.tab = tab;
  for (const name of ["translate", "queue", "monitor"] as const) {
    byId(`tab-${name}`).classList.toggle("active", name === tab);
    byId(`panel-${name}`).classList.toggle("hidden", name !== tab);
  }
  if (tab === "queue") void refreshQueue();
  if (tab === "monitor") renderMonitorSources();
}

// --- translate panel ------------------------------------------------------------

async function submitRule(): Promise<void> {
  const ruleText = byId<HTMLTextAreaElement>("rule-input").value.trim();
  if (!ruleText) {
    setBanner("enter a rule to translate");
    return;
  }
  const mode = byId<HTMLSelectElement>("mode-select").value as "plain" | "cot";
  const samples = Number(byId<HTMLInputElement>("samples-input").value) || 5;
  state.busy = true;
  setBanner(null);
  renderDecisionControls();
  try {
    const response: TranslateResponse = await api.translate(ruleText, { mode, samples });
    state.current = buildReviewViewModel(response);
    state.currentStatus = "pending";
    state.editedText = state.current.winner ?? "";
    state.validation = { kind: "idle" };
    renderResult();
    await refreshQueue();
  } catch (error) {
    setBanner(describeError(error));
  } finally {
    state.busy = false;
    renderDecisionControls();
  }
}

function renderResult(): void {
  const vm = state.current;
  const host = byId<HTMLDivElement>("result");
  host.replaceChildren();
  if (!vm) {
    host.append(el("p", { class: "muted" }, "No translation yet."));
    return;
  }
  host.append(
    el(
      "div",
      { class: "result-head" },
      el("h3", {}, `Translation for ${vm.ruleId}`),
      el(
        "p",
        { class: "muted" },
        vm.winner === null
          ? "No sample produced a parseable formula."
          : `Winner by majority vote over ${vm.sampleCount} samples.`,
      ),
    ),
  );

  const tally = el("div", { class: "tally" });
  for (const row of vm.voteRows) {
    tally.append(
      el(
        "div",
        { class: "tally-row" },
        el("span", { class: "count" }, String(row.count)),
        el("code", {}, row.form),
      ),
    );
  }
  if (vm.unparsedCount > 0) {
    tally.append(
      el(
        "div",
        { class: "tally-row" },
        el("span", { class: "count" }, String(vm.unparsedCount)),
        el("span", { class: "muted" }, "unparseable sample(s)"),
      ),
    );
  }
  host.append(el("h4", {}, "Vote tally"), tally);

  const list = el("div", { class: "candidates" });
  for (const candidate of vm.candidates) {
    const header = el(
      "div",
      { class: "candidate-head" },
      el("span", { class: "badge" }, `sample ${candidate.sampleIndex}`),
      candidate.isWinner ? el("span", { class: "badge winner" }, "winner") : "",
      candidate.formula !== null
        ? el("code", {}, candidate.formula)
        : el("span", { class: "error" }, candidate.parseError ?? "unparseable"),
      candidate.formula !== null
        ? el("span", { class: "muted" }, `${candidate.voteCount} vote(s)`)
        : "",
    );
    const body = el("div", { class: "candidate-body" });
    if (candidate.vocabViolations.length > 0) {
      body.append(
        el(
          "p",
          { class: "warn" },
          `outside vocabulary: ${candidate.vocabViolations.join(", ")}`,
        ),
      );
    }
    if (candidate.propositionMap.length > 0) {
      const table = el("table", { class: "props" });
      for (const [fragment, proposition] of candidate.propositionMap) {
        table.append(
          el("tr", {}, el("td", {}, fragment), el("td", {}, el("code", {}, proposition))),
        );
      }
      body.append(el("h5", {}, "Propositions"), table);
    }
    const reasoning = el("pre", { class: "raw hidden" }, candidate.rawOutput);
    const toggle = el("button", { class: "link", type: "button" }, "show raw output");
    toggle.addEventListener("click", () => {
      const hidden = reasoning.classList.toggle("hidden");
      toggle.textContent = hidden ? "show raw output" : "hide raw output";
    });
    body.append(toggle, reasoning);
    list.append(el("div", { class: "candidate" }, header, body));
  }
  host.append(el("h4", {}, "Candidates"), list);

  byId<HTMLDivElement>("decision").classList.remove("hidden");
  const editor = byId<HTMLTextAreaElement>("formula-editor");
  editor.value = state.editedText;
  byId<HTMLTextAreaElement>("note-input").value = "";
  renderDecisionControls();
}

function renderDecisionControls(): void {
  const vm = state.current;
  const panel = byId<HTMLDivElement>("decision");
  if (!vm) {
    panel.classList.add("hidden");
    return;
  }
  const terminal = state.currentStatus !== "pending";
  const gateInput: GateInput = {
    winner: vm.winner,
    editedText: state.editedText,
    validation: state.validation,
    busy: state.busy,
  };
  const gate = decisionGate(gateInput);

  const message = byId<HTMLDivElement>("validation-message");
  message.replaceChildren();
  if (state.validation.kind === "invalid") {
    message.append(
      el("div", { class: "error" }, offsetMessage(state.validation.message, state.validation.offset)),
    );
    if (state.validation.offset !== undefined) {
      message.append(
        el("pre", { class: "caret" }, `${state.editedText}\n${caretLine(state.editedText, state.validation.offset)}`),
      );
    }
  } else if (state.validation.kind === "valid") {
    message.append(el("div", { class: "ok" }, `canonical: ${state.validation.canonical}`));
  } else {
    message.append(el("div", { class: "muted" }, gate.reason));
  }

  byId<HTMLButtonElement>("accept-btn").disabled = terminal || !gate.canAccept;
  byId<HTMLButtonElement>("save-btn").disabled = terminal || !gate.canSaveEdit;
  byId<HTMLButtonElement>("reject-btn").disabled = terminal || !gate.canReject;
  byId<HTMLDivElement>("decision-status").textContent = terminal
    ? `review is ${state.currentStatus}`
    : "";
}

async function decide(status: ReviewStatus): Promise<void> {
  const vm = state.current;
  if (!vm) return;
  const decision: { status: ReviewStatus; final_mtl?: string; note?: string } = { status };
  if (status === "accepted" && vm.winner !== null) {
    decision.final_mtl = vm.winner;
  }
  if (status === "edited") {
    if (state.validation.kind !== "valid") return; // gate already blocks this
    decision.final_mtl = state.validation.formula;
  }
  const note = byId<HTMLTextAreaElement>("note-input").value.trim();
  if (note) decision.note = note;

  state.busy = true;
  renderDecisionControls();
  try {
    const entry = await api.decideReview(vm.reviewId, decision);
    state.currentStatus = entry.status;
    setBanner(null);
    await refreshQueue();
  } catch (error) {
    setBanner(describeError(error));
  } finally {
    state.busy = false;
    renderDecisionControls();
  }
}

// --- queue panel -----------------------------------------------------------------

async function refreshQueue(): Promise<void> {
  try {
    const filter = state.queueFilter;
    state.queue = await api.listReviews(filter === "all" ? undefined : filter);
    renderQueue();
    renderMonitorSources();
  } catch (error) {
    setBanner(describeError(error));
  }
}

function renderQueue(): void {
  const host = byId<HTMLTableSectionElement>("queue-body");
  host.replaceChildren();
  for (const entry of state.queue) {
    const row = el(
      "tr",
      { class: "queue-row" },
      el("td", {}, entry.review_id),
      el("td", {}, el("span", { class: `status ${entry.status}` }, entry.status)),
      el("td", { class: "rule-cell" }, entry.submitted_text),
      el("td", {}, el("code", {}, entry.final_mtl ?? entry.winner ?? "—")),
    );
    row.addEventListener("click", () => void showQueueDetail(entry.review_id));
    host.append(row);
  }
  byId<HTMLDivElement>("queue-empty").classList.toggle("hidden", state.queue.length > 0);
}

async function showQueueDetail(reviewId: string): Promise<void> {
  try {
    const entry = await api.getReview(reviewId);
    const host = byId<HTMLDivElement>("queue-detail");
    host.replaceChildren(
      el("h4", {}, `Review ${entry.review_id} (${entry.status})`),
      el("p", {}, entry.submitted_text),
      el(
        "p",
        {},
        "final formula: ",
        el("code", {}, entry.final_mtl ?? "none"),
        entry.reviewer_note ? ` — note: ${entry.reviewer_note}` : "",
      ),
      el(
        "p",
        { class: "muted" },
        `created ${entry.created}, updated ${entry.updated}, ` +
          `${entry.result.candidates.length} candidate(s)`,
      ),
    );
  } catch (error) {
    setBanner(describeError(error));
  }
}

// --- monitor panel ------------------------------------------------------------------

function renderMonitorSources(): void {
  const select = byId<HTMLSelectElement>("monitor-formula-select");
  const previous = select.value;
  select.replaceChildren(el("option", { value: "" }, "— type a formula below —"));
  for (const entry of state.queue) {
    if ((entry.status === "accepted" || entry.status === "edited") && entry.final_mtl) {
      select.append(el("option", { value: entry.final_mtl }, `${entry.review_id}: ${entry.final_mtl}`));
    }
  }
  select.value = previous;
}

async function runMonitor(): Promise<void> {
  const selected = byId<HTMLSelectElement>("monitor-formula-select").value;
  const typed = byId<HTMLInputElement>("monitor-formula-input").value.trim();
  const formula = typed || selected;
  state.monitorError = null;
  state.monitorResult = null;
  if (!formula) {
    state.monitorError = "choose an accepted formula or type one";
    renderMonitorResult();
    return;
  }
  const fileInput = byId<HTMLInputElement>("trace-file");
  const file = fileInput.files?.[0];
  if (!file) {
    state.monitorError = "upload a trace file (JSON with a 'states' array)";
    renderMonitorResult();
    return;
  }
  let trace: TraceDocument;
  try {
    trace = JSON.parse(await file.text()) as TraceDocument;
  } catch {
    state.monitorError = "trace file is not valid JSON";
    renderMonitorResult();
    return;
  }
  try {
    state.monitorResult = await api.monitor(formula, trace);
  } catch (error) {
    state.monitorError = describeError(error);
  }
  renderMonitorResult();
}

function renderMonitorResult(): void {
  const host = byId<HTMLDivElement>("monitor-result");
  host.replaceChildren();
  if (state.monitorError) {
    host.append(el("div", { class: "error" }, state.monitorError));
    return;
  }
  const result = state.monitorResult;
  if (!result) return;
  host.append(
    el(
      "div",
      { class: result.holds ? "ok" : "error" },
      result.holds
        ? `rule holds: ${result.formula}`
        : `rule violated at position ${result.violation_position ?? 0}: ${result.formula}`,
    ),
  );
}

// --- wiring ---------------------------------------------------------------------------

function init(): void {
  byId("tab-translate").addEventListener("click", () => switchTab("translate"));
  byId("tab-queue").addEventListener("click", () => switchTab("queue"));
  byId("tab-monitor").addEventListener("click", () => switchTab("monitor"));

  byId("translate-btn").addEventListener("click", () => void submitRule());
  byId<HTMLTextAreaElement>("formula-editor").addEventListener("input", (event) => {
    state.editedText = (event.target as HTMLTextAreaElement).value;
    validator.input(state.editedText);
    renderDecisionControls();
  });
  byId("accept-btn").addEventListener("click", () => void decide("accepted"));
  byId("save-btn").addEventListener("click", () => void decide("edited"));
  byId("reject-btn").addEventListener("click", () => void decide("rejected"));

  byId<HTMLSelectElement>("queue-filter").addEventListener("change", (event) => {
    state.queueFilter = (event.target as HTMLSelectElement).value as AppState["queueFilter"];
    void refreshQueue();
  });
  byId("queue-refresh").addEventListener("click", () => void refreshQueue());
  byId("monitor-run").addEventListener("click", () => void runMonitor());

  switchTab("translate");
}

document.addEventListener("DOMContentLoaded", init);
