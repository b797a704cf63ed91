"""HTTP service: translation, review workflow, monitoring, and evaluation.

Routes (all bodies JSON; errors are ``{"code", "message", "offset"?}``):

* ``POST /api/parse``          — validate one formula, return its canonical form
* ``POST /api/translate``      — run the translation pipeline, open a pending review
* ``GET  /api/reviews``        — list review entries (optional ``?status=`` filter)
* ``GET  /api/reviews/{id}``   — one full review entry
* ``POST /api/reviews/{id}``   — accept / edit / reject a pending entry
* ``POST /api/monitor``        — evaluate a formula over an inline trace
* ``GET  /api/predicates``     — the configured predicate vocabulary
* ``POST /api/eval``           — score a dataset against replay fixtures

When a built review UI directory is configured it is served statically from
the same port, so the browser app needs no cross-origin setup.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .defaults import default_prompt_config, default_swap_rules, default_vocabulary
from .equivalence import SwapRule, canonicalize
from .evaluation import DatasetFormatError, evaluate_dataset, report_to_dict
from .formula import print_formula
from .llm import GatewayError, ProviderSpec, SamplingConfig
from .parser import ParseError, parse_formula
from .pipeline import TranslationResult, translate
from .prompting import COT, PLAIN, ConfigInvalid, PromptConfig
from .semantics import TraceFormatError, first_violation, monitor, trace_from_json
from .store import (
    PENDING,
    IllegalTransition,
    ReviewEntry,
    ReviewStore,
    apply_review_decision,
    entry_to_dict,
    utc_now_iso,
)

__all__ = ["ServiceConfig", "create_app"]


@dataclass
class ServiceConfig:
    store: ReviewStore
    provider: Optional[ProviderSpec] = None
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    swaps: frozenset[SwapRule] = field(default_factory=default_swap_rules)
    vocabulary: tuple[tuple[str, int, str], ...] = field(default_factory=default_vocabulary)
    prompts_dir: Optional[Path] = None
    ui_dir: Optional[Path] = None

    def prompt_config(self, mode: str) -> PromptConfig:
        return default_prompt_config(mode, self.prompts_dir)


def _error(status: int, code: str, message: str, offset: Optional[int] = None) -> JSONResponse:
    body: dict = {"code": code, "message": message}
    if offset is not None:
        body["offset"] = offset
    return JSONResponse(status_code=status, content=body)


def _parse_error(exc: ParseError) -> JSONResponse:
    return _error(400, "parse_error", str(exc), offset=exc.offset)


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except Exception:
        raise _BadBody("request body is not valid JSON")
    if not isinstance(body, dict):
        raise _BadBody("request body must be a JSON object")
    return body


class _BadBody(Exception):
    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


def create_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="rulebench", docs_url=None, redoc_url=None)
    store = config.store

    @app.exception_handler(_BadBody)
    async def _bad_body_handler(_request: Request, exc: _BadBody):
        return _error(400, "bad_request", exc.message)

    @app.post("/api/parse")
    async def api_parse(request: Request):
        body = await _json_body(request)
        text = body.get("formula")
        if not isinstance(text, str):
            return _error(400, "bad_request", "field 'formula' (string) is required")
        try:
            f = parse_formula(text)
        except ParseError as exc:
            return _parse_error(exc)
        return {
            "formula": print_formula(f),
            "canonical": print_formula(canonicalize(f, config.swaps)),
        }

    @app.post("/api/translate")
    async def api_translate(request: Request):
        if config.provider is None:
            return _error(502, "provider_failure", "service is running without a provider")
        body = await _json_body(request)
        rule_text = body.get("rule_text")
        if not isinstance(rule_text, str) or not rule_text.strip():
            return _error(400, "bad_request", "field 'rule_text' (non-empty string) is required")
        mode = body.get("mode", COT)
        if mode not in (PLAIN, COT):
            return _error(400, "bad_request", f"mode must be 'plain' or 'cot', not {mode!r}")
        samples = body.get("samples", config.sampling.samples_per_rule)
        if not isinstance(samples, int) or samples < 1:
            return _error(400, "bad_request", "samples must be a positive integer")
        rule_id = body.get("rule_id")
        if rule_id is not None and not isinstance(rule_id, str):
            return _error(400, "bad_request", "rule_id must be a string")

        sampling = SamplingConfig(
            temperature=config.sampling.temperature,
            top_p=config.sampling.top_p,
            samples_per_rule=samples,
            max_output_tokens=config.sampling.max_output_tokens,
        )
        try:
            prompt_config = config.prompt_config(mode)
            result = translate(
                rule_text, prompt_config, config.provider, sampling, config.swaps,
                rule_id=rule_id,
            )
        except ConfigInvalid as exc:
            return _error(400, "bad_request", str(exc))
        except GatewayError as exc:
            return _error(502, "provider_failure", str(exc))

        now = utc_now_iso()
        entry = ReviewEntry(
            review_id=uuid.uuid4().hex[:12],
            rule_id=result.rule_id,
            submitted_text=rule_text,
            result=result,
            status=PENDING,
            created=now,
            updated=now,
        )
        store.save(entry)
        return _translate_payload(entry, result)

    @app.get("/api/reviews")
    async def api_reviews(status: Optional[str] = None):
        entries = store.load_all(status=status)
        return {"reviews": [_entry_summary(e) for e in entries]}

    @app.get("/api/reviews/{review_id}")
    async def api_review(review_id: str):
        try:
            entry = store.get(review_id)
        except KeyError:
            return _error(404, "not_found", f"unknown review id {review_id!r}")
        return entry_to_dict(entry)

    @app.post("/api/reviews/{review_id}")
    async def api_review_decision(review_id: str, request: Request):
        body = await _json_body(request)
        try:
            entry = store.get(review_id)
        except KeyError:
            return _error(404, "not_found", f"unknown review id {review_id!r}")
        status = body.get("status")
        if not isinstance(status, str):
            return _error(400, "bad_request", "field 'status' (string) is required")
        final_mtl = body.get("final_mtl")
        if final_mtl is not None and not isinstance(final_mtl, str):
            return _error(400, "bad_request", "final_mtl must be a string")
        note = body.get("note")
        if note is not None and not isinstance(note, str):
            return _error(400, "bad_request", "note must be a string")
        try:
            updated = apply_review_decision(entry, status, final_mtl, note)
        except IllegalTransition as exc:
            return _error(409, "illegal_transition", str(exc))
        except ParseError as exc:
            return _parse_error(exc)
        except ValueError as exc:
            return _error(400, "bad_request", str(exc))
        store.save(updated)
        return entry_to_dict(updated)

    @app.post("/api/monitor")
    async def api_monitor(request: Request):
        body = await _json_body(request)
        formula_text = body.get("formula")
        if not isinstance(formula_text, str):
            return _error(400, "bad_request", "field 'formula' (string) is required")
        try:
            f = parse_formula(formula_text)
        except ParseError as exc:
            return _parse_error(exc)
        try:
            trace = trace_from_json(body.get("trace"))
        except TraceFormatError as exc:
            return _error(400, "bad_request", str(exc))
        verdict = monitor(f, trace)
        return {
            "holds": verdict.holds,
            "at_position": verdict.at_position,
            "formula": print_formula(verdict.formula),
            "violation_position": first_violation(f, trace),
        }

    @app.get("/api/predicates")
    async def api_predicates():
        return {
            "predicates": [
                {"predicate": name, "arity": arity, "description": description}
                for name, arity, description in config.vocabulary
            ]
        }

    @app.post("/api/eval")
    async def api_eval(request: Request):
        body = await _json_body(request)
        dataset_path = body.get("dataset_path")
        fixtures_path = body.get("fixtures_path")
        if not isinstance(dataset_path, str) or not isinstance(fixtures_path, str):
            return _error(
                400, "bad_request", "fields 'dataset_path' and 'fixtures_path' are required"
            )
        exclude_path = body.get("exclude_path")
        if exclude_path is not None and not isinstance(exclude_path, str):
            return _error(400, "bad_request", "exclude_path must be a string")
        mode = body.get("mode", COT)
        try:
            report = evaluate_dataset(
                dataset_path,
                fixtures_path,
                exclude_path,
                prompt_config=config.prompt_config(mode),
                sampling=config.sampling,
                swaps=config.swaps,
            )
        except (DatasetFormatError, OSError, ConfigInvalid) as exc:
            return _error(400, "bad_request", str(exc))
        except GatewayError as exc:
            return _error(502, "provider_failure", str(exc))
        return report_to_dict(report)

    if config.ui_dir is not None and Path(config.ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(config.ui_dir), html=True), name="ui")

    return app


def _candidate_payload(c) -> dict:
    return {
        "sample_index": c.sample_index,
        "raw_output": c.raw_output,
        "formula": print_formula(c.formula) if c.formula is not None else None,
        "canonical": print_formula(c.canonical) if c.canonical is not None else None,
        "proposition_map": [[frag, prop] for frag, prop in c.proposition_map],
        "vocab_violations": [f"{name}/{arity}" for name, arity in c.vocab_violations],
        "parse_error": c.parse_error,
    }


def _translate_payload(entry: ReviewEntry, result: TranslationResult) -> dict:
    return {
        "review_id": entry.review_id,
        "rule_id": result.rule_id,
        "rule_text": result.rule_text,
        "winner_index": result.winner_index,
        "winner": (
            print_formula(result.winner.formula) if result.winner is not None else None
        ),
        "vote_tally": dict(result.vote_tally),
        "candidates": [_candidate_payload(c) for c in result.candidates],
    }


def _entry_summary(entry: ReviewEntry) -> dict:
    winner = entry.result.winner
    return {
        "review_id": entry.review_id,
        "rule_id": entry.rule_id,
        "submitted_text": entry.submitted_text,
        "status": entry.status,
        "final_mtl": entry.final_mtl,
        "winner": print_formula(winner.formula) if winner is not None else None,
        "created": entry.created,
        "updated": entry.updated,
    }
