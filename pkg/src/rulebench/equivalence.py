"""Canonical forms, logic-preserving equivalence, and mismatch classification.

Two formulas count as the same translation when they agree up to operand
order of And/Or, associativity, double negation, rewriting an implication
as a disjunction, and declared predicate symmetries (swap rules such as
``right_of(a,b) == left_of(b,a)``). Canonicalization picks one
deterministic representative per equivalence class; full semantic
equivalence of MTL is deliberately out of scope.

Negation is pushed inward through the classical connectives only. The
next/until/past operators have no dual in the supported grammar, so a
negation resting on a temporal operator (or an atom) stays where it is;
this also keeps each formula's temporal-operator multiset stable, which
the mismatch classifier relies on.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Union

from .formula import (
    And,
    Atom,
    Formula,
    Implies,
    Not,
    Or,
    Temporal,
    Until,
    atoms_of,
    collect_vocabulary,
    print_formula,
)

__all__ = [
    "SwapRule",
    "SwapArityMismatch",
    "SwapRuleError",
    "ErrorClass",
    "load_swap_rules",
    "symmetric_closure",
    "canonicalize",
    "equivalent",
    "classify_error",
]

TEMPORAL_NAMES = ("G", "F", "X", "P", "U")


class SwapArityMismatch(Exception):
    """A swap rule's permutation does not fit the arity of an atom it applies to."""


class SwapRuleError(Exception):
    """A swap-rule configuration file is malformed."""


@dataclass(frozen=True, slots=True)
class SwapRule:
    """Declares ``from_predicate(args) == to_predicate(args permuted)``.

    ``arg_permutation[k]`` is the index into the original argument tuple that
    supplies the k-th argument of the rewritten atom.
    """

    from_predicate: str
    to_predicate: str
    arg_permutation: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "arg_permutation", tuple(self.arg_permutation))
        if sorted(self.arg_permutation) != list(range(len(self.arg_permutation))):
            raise SwapRuleError(
                f"arg_permutation must be a permutation of 0..{len(self.arg_permutation) - 1}: "
                f"{self.arg_permutation}"
            )

    def inverse(self) -> "SwapRule":
        inv = tuple(self.arg_permutation.index(k) for k in range(len(self.arg_permutation)))
        return SwapRule(self.to_predicate, self.from_predicate, inv)


def symmetric_closure(rules: Iterable[SwapRule]) -> frozenset[SwapRule]:
    closed = set(rules)
    closed.update(r.inverse() for r in list(closed))
    return frozenset(closed)


def load_swap_rules(path: Union[str, Path]) -> frozenset[SwapRule]:
    """Load swap rules from a JSON array of {from, to, perm} records."""

    raw = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SwapRuleError(f"swap-rule file is not valid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise SwapRuleError("swap-rule file must contain a JSON array")
    rules = []
    for idx, rec in enumerate(doc):
        if not isinstance(rec, dict) or not {"from", "to", "perm"} <= rec.keys():
            raise SwapRuleError(f"swap-rule record {idx} needs fields from/to/perm")
        rules.append(SwapRule(rec["from"], rec["to"], tuple(rec["perm"])))
    return symmetric_closure(rules)


def canonicalize(f: Formula, swaps: Iterable[SwapRule] = ()) -> Formula:
    """Deterministic representative of ``f``'s equivalence class.

    Implications become disjunctions, negation is pushed through the
    classical connectives, atoms are rewritten to the smallest member of
    their swap orbit, and And/Or operand lists are flattened and sorted by
    their printed form. Idempotent by construction.
    """

    adjacency = _adjacency(symmetric_closure(swaps))
    g = _nnf(f, negated=False)
    g = _apply_swaps(g, adjacency)
    return _sort_ops(g)


def equivalent(a: Formula, b: Formula, swaps: Iterable[SwapRule] = ()) -> bool:
    """True iff ``a`` and ``b`` have the same canonical form."""

    return canonicalize(a, swaps) == canonicalize(b, swaps)


class ErrorClass(Enum):
    """Primary mismatch classes for a gold/candidate comparison, by priority."""

    GRAMMAR_VIOLATION = "GrammarViolation"
    WRONG_TEMPORAL_OPERATOR = "WrongTemporalOperator"
    WRONG_PREDICATE = "WrongPredicate"
    WRONG_ARGUMENT_ORDER = "WrongArgumentOrder"
    WRONG_LOGICAL_CONNECTIVE = "WrongLogicalConnective"
    CORRECT = "Correct"


def classify_error(
    gold: Formula, candidate: Optional[Formula], swaps: Iterable[SwapRule] = ()
) -> ErrorClass:
    """Classify how ``candidate`` deviates from ``gold``.

    An absent candidate (raw output that never parsed) is a grammar
    violation. Otherwise canonical forms are compared and the
    highest-priority difference wins: temporal-operator multiset, then
    predicate set, then argument tuples, then anything left is a wrong
    logical connective.
    """

    if candidate is None:
        return ErrorClass.GRAMMAR_VIOLATION
    cg = canonicalize(gold, swaps)
    cc = canonicalize(candidate, swaps)
    if cg == cc:
        return ErrorClass.CORRECT
    if _temporal_multiset(cg) != _temporal_multiset(cc):
        return ErrorClass.WRONG_TEMPORAL_OPERATOR
    preds_g, _ = collect_vocabulary(cg)
    preds_c, _ = collect_vocabulary(cc)
    if preds_g != preds_c:
        return ErrorClass.WRONG_PREDICATE
    if atoms_of(cg) != atoms_of(cc):
        return ErrorClass.WRONG_ARGUMENT_ORDER
    return ErrorClass.WRONG_LOGICAL_CONNECTIVE


def _temporal_multiset(f: Formula) -> Counter[str]:
    _, ops = collect_vocabulary(f)
    return Counter({name: ops[name] for name in TEMPORAL_NAMES if ops[name]})


def _nnf(f: Formula, negated: bool) -> Formula:
    if isinstance(f, Atom):
        return Not(f) if negated else f
    if isinstance(f, Not):
        return _nnf(f.operand, not negated)
    if isinstance(f, And):
        parts = tuple(_nnf(op, negated) for op in f.operands)
        return Or(parts) if negated else And(parts)
    if isinstance(f, Or):
        parts = tuple(_nnf(op, negated) for op in f.operands)
        return And(parts) if negated else Or(parts)
    if isinstance(f, Implies):
        if negated:  # !(a -> b) == a & !b
            return And((_nnf(f.antecedent, False), _nnf(f.consequent, True)))
        return Or((_nnf(f.antecedent, True), _nnf(f.consequent, False)))
    if isinstance(f, Temporal):
        inner = Temporal(f.op, f.interval, _nnf(f.operand, False))
        return Not(inner) if negated else inner
    if isinstance(f, Until):
        inner = Until(_nnf(f.left, False), _nnf(f.right, False), f.interval)
        return Not(inner) if negated else inner
    raise TypeError(f"not a formula node: {f!r}")


def _adjacency(rules: frozenset[SwapRule]) -> dict[str, list[SwapRule]]:
    adj: dict[str, list[SwapRule]] = {}
    for rule in sorted(rules, key=lambda r: (r.from_predicate, r.to_predicate, r.arg_permutation)):
        adj.setdefault(rule.from_predicate, []).append(rule)
    return adj


def _canonical_atom(atom: Atom, adjacency: dict[str, list[SwapRule]]) -> Atom:
    if atom.predicate not in adjacency:
        return atom
    identity = tuple(range(atom.arity))
    seen: set[tuple[str, tuple[int, ...]]] = {(atom.predicate, identity)}
    queue: deque[tuple[str, tuple[int, ...]]] = deque(seen)
    best: Optional[tuple[str, tuple[str, ...]]] = None
    while queue:
        pred, perm = queue.popleft()
        args = tuple(atom.args[j] for j in perm)
        if best is None or (pred, args) < best:
            best = (pred, args)
        for rule in adjacency.get(pred, ()):
            if len(rule.arg_permutation) != atom.arity:
                raise SwapArityMismatch(
                    f"swap rule {rule.from_predicate}->{rule.to_predicate} expects arity "
                    f"{len(rule.arg_permutation)} but {atom.predicate} has arity {atom.arity}"
                )
            composed = tuple(perm[k] for k in rule.arg_permutation)
            state = (rule.to_predicate, composed)
            if state not in seen:
                seen.add(state)
                queue.append(state)
    assert best is not None
    return Atom(best[0], best[1])


def _apply_swaps(f: Formula, adjacency: dict[str, list[SwapRule]]) -> Formula:
    if not adjacency:
        return f
    if isinstance(f, Atom):
        return _canonical_atom(f, adjacency)
    if isinstance(f, Not):
        return Not(_apply_swaps(f.operand, adjacency))
    if isinstance(f, And):
        return And(tuple(_apply_swaps(op, adjacency) for op in f.operands))
    if isinstance(f, Or):
        return Or(tuple(_apply_swaps(op, adjacency) for op in f.operands))
    if isinstance(f, Implies):
        return Implies(_apply_swaps(f.antecedent, adjacency), _apply_swaps(f.consequent, adjacency))
    if isinstance(f, Temporal):
        return Temporal(f.op, f.interval, _apply_swaps(f.operand, adjacency))
    if isinstance(f, Until):
        return Until(_apply_swaps(f.left, adjacency), _apply_swaps(f.right, adjacency), f.interval)
    raise TypeError(f"not a formula node: {f!r}")


def _sort_ops(f: Formula) -> Formula:
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(_sort_ops(f.operand))
    if isinstance(f, (And, Or)):
        parts = sorted((_sort_ops(op) for op in f.operands), key=print_formula)
        return And(tuple(parts)) if isinstance(f, And) else Or(tuple(parts))
    if isinstance(f, Implies):
        return Implies(_sort_ops(f.antecedent), _sort_ops(f.consequent))
    if isinstance(f, Temporal):
        return Temporal(f.op, f.interval, _sort_ops(f.operand))
    if isinstance(f, Until):
        return Until(_sort_ops(f.left), _sort_ops(f.right), f.interval)
    raise TypeError(f"not a formula node: {f!r}")
