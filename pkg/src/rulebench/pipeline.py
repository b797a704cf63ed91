"""Translation of one rule: prompt, sample N completions, parse, vote.

Each sampled output is extracted into a candidate; parseable candidates are
canonicalized and vote for their canonical form. The winner is the modal
form, ties broken by the lowest sample index at which a tied form first
appeared. Unparseable samples cast no vote but are retained for error
analysis, and vocabulary violations are surfaced without disqualifying a
candidate.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional

from .equivalence import SwapRule, canonicalize
from .formula import print_formula
from .llm import ProviderSpec, SamplingConfig, complete
from .prompting import PromptConfig, TranslationCandidate, check_vocabulary, extract_candidate, render_prompt

__all__ = [
    "TranslationCandidate",
    "TranslationResult",
    "translate",
    "select_winner",
    "derive_rule_id",
]


def derive_rule_id(rule_text: str) -> str:
    """Deterministic fixture key for a rule given only its text."""

    normalized = " ".join(rule_text.split())
    return "rule-" + hashlib.sha256(normalized.encode("utf-8")).hexdigest()[:12]


@dataclass(frozen=True, slots=True)
class TranslationResult:
    """All candidates for one rule plus the majority-vote outcome."""

    rule_text: str
    rule_id: str
    candidates: tuple[TranslationCandidate, ...]
    winner_index: Optional[int]
    vote_tally: Mapping[str, int]

    @property
    def winner(self) -> Optional[TranslationCandidate]:
        if self.winner_index is None:
            return None
        return self.candidates[self.winner_index]


def select_winner(
    candidates: Iterable[TranslationCandidate],
) -> tuple[Optional[int], dict[str, int]]:
    """Majority vote over canonical forms.

    Returns (index into the sample_index-ordered candidate list of the first
    candidate bearing the winning form, tally keyed by printed canonical
    form). The outcome depends only on the candidates' sample indices, never
    on iteration order.
    """

    ordered = sorted(candidates, key=lambda c: c.sample_index)
    tally: dict[str, int] = {}
    first_pos: dict[str, int] = {}
    for pos, cand in enumerate(ordered):
        if cand.canonical is None:
            continue
        key = print_formula(cand.canonical)
        tally[key] = tally.get(key, 0) + 1
        first_pos.setdefault(key, pos)
    if not tally:
        return None, tally
    best = max(tally, key=lambda k: (tally[k], -first_pos[k]))
    return first_pos[best], tally


def translate(
    rule_text: str,
    prompt_config: PromptConfig,
    provider: ProviderSpec,
    sampling: SamplingConfig,
    swaps: Iterable[SwapRule] = (),
    *,
    rule_id: Optional[str] = None,
) -> TranslationResult:
    """Run the full sample-extract-vote pipeline for one rule."""

    rid = rule_id if rule_id is not None else derive_rule_id(rule_text)
    prompt = render_prompt(prompt_config, rule_text)
    indices = range(sampling.samples_per_rule)

    def fetch(i: int) -> str:
        return complete(provider, prompt, sampling, i, rule_id=rid)

    if provider.kind == "http_chat" and provider.max_concurrency > 1:
        workers = min(sampling.samples_per_rule, provider.max_concurrency)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            raws = list(pool.map(fetch, indices))
    else:
        raws = [fetch(i) for i in indices]

    swaps = tuple(swaps)
    candidates: list[TranslationCandidate] = []
    for i, raw in enumerate(raws):
        cand = extract_candidate(raw, sample_index=i)
        if cand.formula is not None:
            cand = replace(
                cand,
                canonical=canonicalize(cand.formula, swaps),
                vocab_violations=tuple(
                    check_vocabulary(cand.formula, prompt_config.predicate_vocabulary)
                ),
            )
        candidates.append(cand)

    winner_index, tally = select_winner(candidates)
    return TranslationResult(
        rule_text=rule_text,
        rule_id=rid,
        candidates=tuple(candidates),
        winner_index=winner_index,
        vote_tally=tally,
    )
