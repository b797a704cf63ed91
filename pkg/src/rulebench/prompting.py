"""Prompt rendering for few-shot rule translation, and extraction of answers.

Two prompt styles are supported: a plain style that shows worked rule/formula
pairs only, and a chain-of-thought style that additionally shows the formula
template, step-by-step reasoning and a fragment-to-proposition map for every
example. Prompt text lives in editable asset files (see ``assets/prompts``),
not in string constants.

Model output is recovered with a marker contract: the answer must end with a
``FINAL_MTL:`` line, optionally preceded by a ``PROPOSITIONS:`` ...
``END_PROPOSITIONS`` block. Extraction is total: output that honors no part
of the contract is scanned bottom-up for any parseable formula line, and a
candidate with no formula at all is kept with its parse failure recorded.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .formula import Formula, collect_vocabulary
from .parser import ParseError, parse_formula

__all__ = [
    "ConfigInvalid",
    "FewShotExample",
    "PromptConfig",
    "TranslationCandidate",
    "render_prompt",
    "render_example_output",
    "extract_candidate",
    "check_vocabulary",
    "load_example_file",
    "load_examples_dir",
    "load_vocabulary",
]

FINAL_MARKER = "FINAL_MTL:"
PROPS_OPEN = "PROPOSITIONS:"
PROPS_CLOSE = "END_PROPOSITIONS"

PLAIN = "plain"
COT = "cot"


class ConfigInvalid(ValueError):
    """A prompt configuration or example violates its invariants."""


@dataclass(frozen=True, slots=True)
class FewShotExample:
    """One worked example: a rule text and its formula, with optional reasoning.

    ``thought_steps`` and ``proposition_map`` are present together exactly
    when the example is a chain-of-thought triplet.
    """

    rule_text: str
    final_mtl: str
    thought_steps: Optional[tuple[str, ...]] = None
    proposition_map: Optional[tuple[tuple[str, str], ...]] = None

    def __post_init__(self) -> None:
        if not self.rule_text.strip():
            raise ConfigInvalid("example rule_text must be non-empty")
        try:
            parse_formula(self.final_mtl)
        except ParseError as exc:
            raise ConfigInvalid(f"example final_mtl does not parse: {exc}") from exc
        if (self.thought_steps is None) != (self.proposition_map is None):
            raise ConfigInvalid(
                "thought_steps and proposition_map must be present together (CoT triplet)"
            )
        if self.thought_steps is not None:
            object.__setattr__(self, "thought_steps", tuple(self.thought_steps))
            object.__setattr__(self, "proposition_map", tuple(map(tuple, self.proposition_map)))
            if not self.thought_steps:
                raise ConfigInvalid("a CoT example needs at least one thought step")

    @property
    def is_cot(self) -> bool:
        return self.thought_steps is not None


@dataclass(frozen=True, slots=True)
class PromptConfig:
    mode: str
    examples: tuple[FewShotExample, ...]
    template_text: str
    predicate_vocabulary: tuple[tuple[str, int, str], ...] = ()
    instruction_text: str = "Translate the natural-language traffic rule into one MTL formula."

    def __post_init__(self) -> None:
        object.__setattr__(self, "examples", tuple(self.examples))
        object.__setattr__(
            self, "predicate_vocabulary", tuple(map(tuple, self.predicate_vocabulary))
        )
        self.validate()

    def validate(self) -> None:
        if self.mode not in (PLAIN, COT):
            raise ConfigInvalid(f"unknown prompt mode: {self.mode!r}")
        if not self.examples:
            raise ConfigInvalid("prompt config needs at least one example")
        if self.mode == COT:
            for ex in self.examples:
                if not ex.is_cot:
                    raise ConfigInvalid(
                        f"cot mode requires thought steps on every example; "
                        f"missing on {ex.rule_text[:40]!r}"
                    )
            for op in ("G", "F", "X", "P", "U"):
                if op not in self.template_text:
                    raise ConfigInvalid(f"template does not list temporal operator {op}")


@dataclass(frozen=True, slots=True)
class TranslationCandidate:
    """One sampled model output and whatever could be recovered from it.

    Exactly one of ``formula`` / ``parse_error`` is set. ``canonical`` and
    ``vocab_violations`` are filled in by the translation pipeline once the
    swap rules and vocabulary are known.
    """

    sample_index: int
    raw_output: str
    formula: Optional[Formula] = None
    canonical: Optional[Formula] = None
    proposition_map: tuple[tuple[str, str], ...] = ()
    vocab_violations: tuple[tuple[str, int], ...] = ()
    parse_error: Optional[str] = None

    def __post_init__(self) -> None:
        if (self.formula is None) == (self.parse_error is None):
            raise ValueError("exactly one of formula / parse_error must be present")


def render_prompt(config: PromptConfig, rule_text: str) -> str:
    """Deterministic prompt text for ``rule_text`` under ``config``."""

    config.validate()
    if not rule_text.strip():
        raise ConfigInvalid("rule_text must be non-empty")

    parts: list[str] = [config.instruction_text.rstrip()]
    contract = [
        f'End your answer with a single line "{FINAL_MARKER} <formula>" '
        "containing exactly one MTL formula."
    ]
    if config.mode == COT:
        contract.append(
            f'Before it, list every rule fragment and its proposition between a "{PROPS_OPEN}" '
            f'line and an "{PROPS_CLOSE}" line, one "fragment => proposition" pair per line.'
        )
    parts.append(" ".join(contract))

    if config.mode == COT:
        parts.append("MTL TEMPLATE:\n" + config.template_text.rstrip())

    if config.predicate_vocabulary:
        vocab_lines = [
            f"{name}/{arity}  {description}"
            for name, arity, description in config.predicate_vocabulary
        ]
        parts.append("ALLOWED PREDICATES:\n" + "\n".join(vocab_lines))

    for idx, ex in enumerate(config.examples, start=1):
        parts.append(f"Example {idx}:\nRULE: {ex.rule_text}\n" + render_example_output(ex, config.mode))

    parts.append(f"Now translate this rule.\nRULE: {rule_text}\nANSWER:")
    return "\n\n".join(parts) + "\n"


def render_example_output(example: FewShotExample, mode: str) -> str:
    """The answer text an example demonstrates (thoughts, propositions, formula)."""

    lines: list[str] = []
    if mode == COT and example.is_cot:
        lines.append("THOUGHTS:")
        lines.extend(f"{i}. {step}" for i, step in enumerate(example.thought_steps, start=1))
        lines.append(PROPS_OPEN)
        lines.extend(f"{frag} => {prop}" for frag, prop in example.proposition_map)
        lines.append(PROPS_CLOSE)
    lines.append(f"{FINAL_MARKER} {example.final_mtl}")
    return "\n".join(lines)


def extract_candidate(raw_output: str, sample_index: int = 0) -> TranslationCandidate:
    """Recover a formula and proposition map from raw model output.

    Never raises: outputs with no recoverable formula yield a candidate whose
    ``parse_error`` explains the failure.
    """

    lines = raw_output.splitlines()
    proposition_map = _extract_propositions(lines)

    marker_lines = [
        (i, line.strip()[len(FINAL_MARKER):].strip())
        for i, line in enumerate(lines)
        if line.strip().startswith(FINAL_MARKER)
    ]
    if marker_lines:
        _, payload = marker_lines[-1]
        try:
            formula = parse_formula(payload)
        except ParseError as exc:
            return TranslationCandidate(
                sample_index=sample_index,
                raw_output=raw_output,
                parse_error=f"final answer line does not parse: {exc}",
                proposition_map=proposition_map,
            )
        return TranslationCandidate(
            sample_index=sample_index,
            raw_output=raw_output,
            formula=formula,
            proposition_map=proposition_map,
        )

    # No marker: scan bottom-up for the first line that parses as a formula.
    for line in reversed(lines):
        stripped = line.strip()
        if not stripped:
            continue
        try:
            formula = parse_formula(stripped)
        except ParseError:
            continue
        return TranslationCandidate(
            sample_index=sample_index,
            raw_output=raw_output,
            formula=formula,
            proposition_map=proposition_map,
        )
    return TranslationCandidate(
        sample_index=sample_index,
        raw_output=raw_output,
        parse_error="no parseable formula found in output",
        proposition_map=proposition_map,
    )


def _extract_propositions(lines: Sequence[str]) -> tuple[tuple[str, str], ...]:
    opens = [i for i, line in enumerate(lines) if line.strip() == PROPS_OPEN]
    if not opens:
        return ()
    pairs: list[tuple[str, str]] = []
    for line in lines[opens[-1] + 1 :]:
        stripped = line.strip()
        if stripped == PROPS_CLOSE:
            break
        if "=>" in stripped:
            frag, _, prop = stripped.partition("=>")
            pairs.append((frag.strip(), prop.strip()))
    return tuple(pairs)


def check_vocabulary(
    f: Formula, vocab: Iterable[tuple[str, int, str]]
) -> list[tuple[str, int]]:
    """Predicates used by ``f`` that the vocabulary does not allow."""

    allowed = {(name, arity) for name, arity, _ in vocab}
    used, _ = collect_vocabulary(f)
    return sorted(used - allowed)


# --- prompt asset files -----------------------------------------------------

_SECTION_HEADERS = ("RULE:", "THOUGHTS:", "PROPOSITIONS:", "FINAL_MTL:")


def load_example_file(path: Union[str, Path]) -> FewShotExample:
    """Parse a ``.example`` asset with RULE / THOUGHTS / PROPOSITIONS / FINAL_MTL sections."""

    sections: dict[str, list[str]] = {}
    current: Optional[str] = None
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        stripped = line.strip()
        if stripped in _SECTION_HEADERS:
            current = stripped[:-1]
            sections[current] = []
        elif current is not None:
            sections[current].append(line.rstrip())
    if "RULE" not in sections or "FINAL_MTL" not in sections:
        raise ConfigInvalid(f"{path}: example file needs RULE and FINAL_MTL sections")

    rule_text = " ".join(s.strip() for s in sections["RULE"] if s.strip())
    final_mtl = " ".join(s.strip() for s in sections["FINAL_MTL"] if s.strip())
    thoughts = None
    propositions = None
    if "THOUGHTS" in sections:
        thoughts = tuple(s.strip() for s in sections["THOUGHTS"] if s.strip())
        propositions = tuple(
            (frag.strip(), prop.strip())
            for frag, _, prop in (
                s.strip().partition("=>") for s in sections.get("PROPOSITIONS", []) if s.strip()
            )
        )
    return FewShotExample(
        rule_text=rule_text,
        final_mtl=final_mtl,
        thought_steps=thoughts,
        proposition_map=propositions,
    )


def load_examples_dir(path: Union[str, Path]) -> tuple[FewShotExample, ...]:
    files = sorted(Path(path).glob("*.example"))
    if not files:
        raise ConfigInvalid(f"no .example files in {path}")
    return tuple(load_example_file(p) for p in files)


def load_vocabulary(path: Union[str, Path]) -> tuple[tuple[str, int, str], ...]:
    """Read a vocabulary file with ``predicate/arity  description`` lines."""

    entries: list[tuple[str, int, str]] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        head, _, description = stripped.partition("  ")
        name, slash, arity = head.partition("/")
        if not slash or not arity.isdigit():
            raise ConfigInvalid(f"{path}:{lineno}: expected 'predicate/arity  description'")
        entries.append((name, int(arity), description.strip()))
    return tuple(entries)
