/** Debounced, superseding server-side validation of the formula editor.
 *
 * Every keystroke schedules a validation round-trip; only the newest request
 * may publish a result, so a slow stale response can never overwrite the
 * state for newer text.
 */
import { ApiError } from "./api.js";
export class FormulaValidator {
    api;
    debounceMs;
    schedule;
    cancel;
    onState;
    timer = null;
    latestToken = 0;
    constructor(api, onState, options = {}) {
        this.api = api;
        this.onState = onState;
        this.debounceMs = options.debounceMs ?? 250;
        this.schedule = options.schedule ?? ((fn, ms) => setTimeout(fn, ms));
        this.cancel = options.cancel ?? ((handle) => clearTimeout(handle));
    }
    /** Called on every editor change. */
    input(text) {
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
    async run(token, text) {
        let state;
        try {
            const result = await this.api.parse(text);
            state = { kind: "valid", formula: result.formula, canonical: result.canonical };
        }
        catch (error) {
            if (error instanceof ApiError && error.code === "parse_error") {
                state =
                    error.offset === undefined
                        ? { kind: "invalid", message: error.message }
                        : { kind: "invalid", message: error.message, offset: error.offset };
            }
            else {
                state = { kind: "invalid", message: error instanceof Error ? error.message : String(error) };
            }
        }
        if (token === this.latestToken) {
            this.onState(state);
        }
    }
}
