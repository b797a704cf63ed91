"""Dataset loading, scoring against gold formulas, and report rendering.

Dataset files are line-delimited JSON records::

    {"id": "rule_01", "source": "StVO", "rule_text": "...", "gold_mtl": "G(p)",
     "predicates": ["cross/2"], "notes": "optional"}

Scoring compares each rule's winning translation against its gold formula
under the configured swap rules; rules without a translation result are
skipped (and reported), which is how prompt-example rules are excluded from
accuracy. Percentages render with two decimals by truncation, so 35 correct
out of 48 prints as 72.91%.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Union

from .equivalence import ErrorClass, SwapRule, classify_error
from .formula import print_formula
from .llm import ProviderSpec, SamplingConfig, replay_provider
from .parser import ParseError, parse_formula
from .pipeline import TranslationResult, translate
from .prompting import PromptConfig

__all__ = [
    "DatasetFormatError",
    "RuleRecord",
    "RuleOutcome",
    "EvalReport",
    "load_dataset",
    "read_exclusions",
    "score",
    "render_report",
    "report_to_dict",
    "parse_report",
    "format_percent",
    "evaluate_dataset",
]

SOURCES = ("StVO", "VCoRT", "other")


class DatasetFormatError(Exception):
    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


@dataclass(frozen=True, slots=True)
class RuleRecord:
    id: str
    source: str
    rule_text: str
    gold_mtl: str
    predicates: Optional[tuple[str, ...]] = None
    notes: Optional[str] = None


@dataclass(frozen=True, slots=True)
class RuleOutcome:
    """Verdict for one rule: the winning formula (if any) and its class."""

    winner_mtl: Optional[str]
    error_class: ErrorClass
    human_class: Optional[ErrorClass] = None

    @property
    def effective_class(self) -> ErrorClass:
        return self.human_class if self.human_class is not None else self.error_class


@dataclass(frozen=True, slots=True)
class EvalReport:
    per_rule: dict[str, RuleOutcome]
    accuracy: float
    error_histogram: dict[ErrorClass, int]
    evaluated_count: int
    skipped_ids: tuple[str, ...] = ()


def load_dataset(path: Union[str, Path]) -> list[RuleRecord]:
    """Read and validate a line-delimited dataset file."""

    records: list[RuleRecord] = []
    seen_ids: set[str] = set()
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetFormatError(line_no, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(rec, dict):
            raise DatasetFormatError(line_no, "record must be a JSON object")
        for field_name in ("id", "source", "rule_text", "gold_mtl"):
            if not isinstance(rec.get(field_name), str):
                raise DatasetFormatError(line_no, f"missing or non-string field {field_name!r}")
        if rec["source"] not in SOURCES:
            raise DatasetFormatError(
                line_no, f"source must be one of {SOURCES}: {rec['source']!r}"
            )
        if not rec["rule_text"].strip():
            raise DatasetFormatError(line_no, "rule_text must be non-empty")
        if rec["id"] in seen_ids:
            raise DatasetFormatError(line_no, f"duplicate id {rec['id']!r}")
        try:
            parse_formula(rec["gold_mtl"])
        except ParseError as exc:
            raise DatasetFormatError(line_no, f"gold_mtl does not parse: {exc}") from exc
        predicates = rec.get("predicates")
        if predicates is not None:
            if not isinstance(predicates, list) or not all(
                isinstance(p, str) and "/" in p for p in predicates
            ):
                raise DatasetFormatError(
                    line_no, "predicates must be a list of 'name/arity' strings"
                )
            predicates = tuple(predicates)
        notes = rec.get("notes")
        if notes is not None and not isinstance(notes, str):
            raise DatasetFormatError(line_no, "notes must be a string")
        seen_ids.add(rec["id"])
        records.append(
            RuleRecord(
                id=rec["id"],
                source=rec["source"],
                rule_text=rec["rule_text"],
                gold_mtl=rec["gold_mtl"],
                predicates=predicates,
                notes=notes,
            )
        )
    return records


def read_exclusions(path: Union[str, Path]) -> set[str]:
    """Read an exclusion list: one rule id per line, # comments allowed."""

    ids: set[str] = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            ids.add(stripped)
    return ids


def score(
    dataset: Iterable[RuleRecord],
    results: Mapping[str, TranslationResult],
    swaps: Iterable[SwapRule] = (),
    overrides: Optional[Mapping[str, ErrorClass]] = None,
) -> EvalReport:
    """Score translation results against the dataset's gold formulas.

    Dataset rules without a result are skipped and reported; a manual
    override, when present for a rule, supersedes the automatic class.
    """

    swaps = tuple(swaps)
    per_rule: dict[str, RuleOutcome] = {}
    skipped: list[str] = []
    histogram: dict[ErrorClass, int] = {}
    for rec in dataset:
        result = results.get(rec.id)
        if result is None:
            skipped.append(rec.id)
            continue
        gold = parse_formula(rec.gold_mtl)
        winner = result.winner
        if winner is None:
            outcome_class = ErrorClass.GRAMMAR_VIOLATION
            winner_mtl = None
        else:
            outcome_class = classify_error(gold, winner.formula, swaps)
            winner_mtl = print_formula(winner.formula)
        human = overrides.get(rec.id) if overrides else None
        outcome = RuleOutcome(winner_mtl, outcome_class, human)
        per_rule[rec.id] = outcome
        histogram[outcome.effective_class] = histogram.get(outcome.effective_class, 0) + 1

    evaluated = len(per_rule)
    correct = histogram.get(ErrorClass.CORRECT, 0)
    accuracy = correct / evaluated if evaluated else 0.0
    return EvalReport(
        per_rule=per_rule,
        accuracy=accuracy,
        error_histogram=histogram,
        evaluated_count=evaluated,
        skipped_ids=tuple(skipped),
    )


def format_percent(fraction: float) -> str:
    """Two-decimal percentage, truncated (35/48 renders as 72.91%)."""

    hundredths = math.floor(fraction * 100.0 * 100.0 + 1e-9)
    return f"{hundredths / 100.0:.2f}%"


_CLASS_ORDER = (
    ErrorClass.CORRECT,
    ErrorClass.GRAMMAR_VIOLATION,
    ErrorClass.WRONG_TEMPORAL_OPERATOR,
    ErrorClass.WRONG_PREDICATE,
    ErrorClass.WRONG_ARGUMENT_ORDER,
    ErrorClass.WRONG_LOGICAL_CONNECTIVE,
)


def render_report(report: EvalReport, format: str = "text") -> str:
    """Render a report as a human table ("text") or JSON document ("structured")."""

    if format == "structured":
        return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"
    if format != "text":
        raise ValueError(f"unknown report format: {format!r}")

    lines = [f"Evaluated rules: {report.evaluated_count}"]
    if report.skipped_ids:
        lines.append("Skipped (no result): " + ", ".join(report.skipped_ids))
    correct = report.error_histogram.get(ErrorClass.CORRECT, 0)
    if report.evaluated_count:
        lines.append(
            f"Accuracy: {format_percent(report.accuracy)} "
            f"({correct}/{report.evaluated_count})"
        )
    else:
        lines.append("Accuracy: n/a (no rules evaluated)")
    lines.append("Error distribution:")
    for cls in _CLASS_ORDER:
        count = report.error_histogram.get(cls, 0)
        if count or cls is ErrorClass.CORRECT:
            lines.append(f"  {cls.value:<24} {count}")
    lines.append("Per-rule verdicts:")
    for rule_id in sorted(report.per_rule):
        outcome = report.per_rule[rule_id]
        shown = outcome.winner_mtl if outcome.winner_mtl is not None else "(no parseable winner)"
        suffix = " [manual]" if outcome.human_class is not None else ""
        lines.append(f"  {rule_id:<12} {outcome.effective_class.value:<24}{suffix} {shown}")
    return "\n".join(lines) + "\n"


def report_to_dict(report: EvalReport) -> dict:
    return {
        "evaluated_count": report.evaluated_count,
        "accuracy": report.accuracy,
        "accuracy_pct": format_percent(report.accuracy) if report.evaluated_count else "n/a",
        "histogram": {cls.value: count for cls, count in report.error_histogram.items()},
        "skipped": list(report.skipped_ids),
        "per_rule": {
            rule_id: {
                "winner": outcome.winner_mtl,
                "class": outcome.error_class.value,
                "human": outcome.human_class.value if outcome.human_class else None,
            }
            for rule_id, outcome in report.per_rule.items()
        },
    }


def parse_report(text: str) -> EvalReport:
    """Inverse of ``render_report(..., "structured")``."""

    doc = json.loads(text)
    per_rule = {
        rule_id: RuleOutcome(
            winner_mtl=entry["winner"],
            error_class=ErrorClass(entry["class"]),
            human_class=ErrorClass(entry["human"]) if entry.get("human") else None,
        )
        for rule_id, entry in doc["per_rule"].items()
    }
    histogram = {ErrorClass(name): count for name, count in doc["histogram"].items()}
    return EvalReport(
        per_rule=per_rule,
        accuracy=doc["accuracy"],
        error_histogram=histogram,
        evaluated_count=doc["evaluated_count"],
        skipped_ids=tuple(doc.get("skipped", ())),
    )


def evaluate_dataset(
    dataset_path: Union[str, Path],
    fixtures_path: Union[str, Path],
    exclude_path: Optional[Union[str, Path]] = None,
    *,
    prompt_config: PromptConfig,
    sampling: Optional[SamplingConfig] = None,
    swaps: Iterable[SwapRule] = (),
    provider: Optional[ProviderSpec] = None,
) -> EvalReport:
    """Translate every non-excluded dataset rule from fixtures and score it.

    This is the single implementation behind both the CLI and the HTTP eval
    endpoints, so the two surfaces always produce identical reports.
    """

    records = load_dataset(dataset_path)
    excluded = read_exclusions(exclude_path) if exclude_path else set()
    provider = provider if provider is not None else replay_provider(fixtures_path)
    sampling = sampling if sampling is not None else SamplingConfig()
    swaps = tuple(swaps)
    results: dict[str, TranslationResult] = {}
    for rec in records:
        if rec.id in excluded:
            continue
        results[rec.id] = translate(
            rec.rule_text, prompt_config, provider, sampling, swaps, rule_id=rec.id
        )
    return score(records, results, swaps)
