/** Debounced, superseding server-side validation of the formula editor.
 *
 * Every keystroke schedules a validation round-trip; only the newest request
 * may publish a result, so a slow stale response can never overwrite the
 * state for newer text.
 */

import { ApiClient, ApiError } from "./api.js";
import type { ValidationState } from "./viewmodel.js";

type Scheduler = (fn: () => void, ms: number) => unknown;
type Canceller = (handle: unknown) => void;

export class FormulaValidator {
  private readonly api: ApiClient;
  private readonly debounceMs: number;
  private readonly schedule: Scheduler;
  private readonly cancel: Canceller;
  private readonly onState: (state: ValidationState) => void;
  private timer: unknown = null;
  private latestToken = 0;

  constructor(
    api: ApiClient,
    onState: (state: ValidationState) => void,
    options: { debounceMs?: number; schedule?: Scheduler; cancel?: Canceller } = {},
  ) {
    this.api = api;
    this.onState = onState;
    this.debounceMs = options.debounceMs ?? 250;
    this.schedule = options.schedule ?? ((fn, ms) => setTimeout(fn, ms));
    this.cancel = options.cancel ?? ((handle) => clearTimeout(handle as number));
  }

  /** Called on every editor change. */
  input(text: string): void {
    if (this.timer !== null) {
      this.cancel(this.timer);
      this.timer = null;
    }
    const trimmed = text.trim();
    if (!trimmed) {
      this.latestToken += 1;
      this.onState({ kind: "idle" });
      return;
    }
    this.onState({ kind: "pending" });
    const token = ++this.latestToken;
    this.timer = this.schedule(() => {
      void this.run(token, trimmed);
    }, this.debounceMs);
  }

  private async run(token: number, text: string): Promise<void> {
    let state: ValidationState;
    try {
      const result = await this.api.parse(text);
      state = { kind: "valid", formula: result.formula, canonical: result.canonical };
    } catch (error) {
      if (error instanceof ApiError && error.code === "parse_error") {
        state =
          error.offset === undefined
            ? { kind: "invalid", message: error.message }
            : { kind: "invalid", message: error.message, offset: error.offset };
      } else {
        state = { kind: "invalid", message: error instanceof Error ? error.message : String(error) };
      }
    }
    if (token === this.latestToken) {
      this.onState(state);
    }
  }
}
