"""Abstract syntax for MTL formulas, plus the pretty-printer and vocabulary walk.

The AST mirrors the concrete grammar accepted by :mod:`rulebench.parser`:
atoms over predicates with identifier or numeric arguments, the classical
connectives, interval-decorated unary temporal operators (G, F, X, P) and
the binary until operator. All nodes are immutable values with structural
equality, so formulas can be hashed, shared between threads, and compared
directly in tests.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

__all__ = [
    "Formula",
    "Atom",
    "Not",
    "And",
    "Or",
    "Implies",
    "Temporal",
    "Until",
    "Interval",
    "TEMPORAL_OPS",
    "print_formula",
    "collect_vocabulary",
    "atoms_of",
]

TEMPORAL_OPS = ("G", "F", "X", "P")

_IDENT_RE = re.compile(r"[a-z][a-z0-9_]*\Z")
_NAT_RE = re.compile(r"[0-9]+\Z")


@dataclass(frozen=True, slots=True)
class Interval:
    """Inclusive discrete window [lo, hi] in trace steps.

    An *absent* interval on a temporal operator (modelled as ``None``, never a
    sentinel Interval) means "to the end of the trace".
    """

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if not isinstance(self.lo, int) or not isinstance(self.hi, int):
            raise ValueError("interval bounds must be integers")
        if self.lo < 0 or self.hi < 0:
            raise ValueError(f"interval bounds must be non-negative: [{self.lo},{self.hi}]")
        if self.lo > self.hi:
            raise ValueError(f"interval lower bound exceeds upper bound: [{self.lo},{self.hi}]")

    def __str__(self) -> str:
        return f"[{self.lo},{self.hi}]"


class Formula:
    """Base class for all formula nodes."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    """Ground atomic proposition, e.g. ``in_front(stop_line, ego)`` or ``p``."""

    predicate: str
    args: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))
        if not _IDENT_RE.match(self.predicate):
            raise ValueError(f"invalid predicate name: {self.predicate!r}")
        for a in self.args:
            if not (_IDENT_RE.match(a) or _NAT_RE.match(a)):
                raise ValueError(f"invalid atom argument: {a!r}")

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True, slots=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    """N-ary conjunction; nested conjunctions are flattened at construction."""

    operands: tuple[Formula, ...]

    def __post_init__(self) -> None:
        flat: list[Formula] = []
        for op in self.operands:
            if isinstance(op, And):
                flat.extend(op.operands)
            else:
                flat.append(op)
        object.__setattr__(self, "operands", tuple(flat))
        if len(self.operands) < 2:
            raise ValueError("conjunction needs at least two operands")


@dataclass(frozen=True, slots=True)
class Or(Formula):
    """N-ary disjunction; nested disjunctions are flattened at construction."""

    operands: tuple[Formula, ...]

    def __post_init__(self) -> None:
        flat: list[Formula] = []
        for op in self.operands:
            if isinstance(op, Or):
                flat.extend(op.operands)
            else:
                flat.append(op)
        object.__setattr__(self, "operands", tuple(flat))
        if len(self.operands) < 2:
            raise ValueError("disjunction needs at least two operands")


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    antecedent: Formula
    consequent: Formula


@dataclass(frozen=True, slots=True)
class Temporal(Formula):
    """Unary temporal operator: G (always), F (eventually), X (next), P (past)."""

    op: str
    interval: Interval | None
    operand: Formula

    def __post_init__(self) -> None:
        if self.op not in TEMPORAL_OPS:
            raise ValueError(f"unknown temporal operator: {self.op!r}")


@dataclass(frozen=True, slots=True)
class Until(Formula):
    left: Formula
    right: Formula
    interval: Interval | None = None


def print_formula(f: Formula) -> str:
    """Render ``f`` as deterministic ASCII concrete syntax.

    Every composite infix subterm is parenthesized, atoms are bare, and
    arity-0 atoms are written without parentheses, so the output always
    parses back to a structurally equal formula.
    """

    return _render(f)


def _render(f: Formula) -> str:
    if isinstance(f, (And, Or, Implies, Until)):
        return f"({_render_bare(f)})"
    return _render_bare(f)


def _render_bare(f: Formula) -> str:
    if isinstance(f, Atom):
        if not f.args:
            return f.predicate
        return f"{f.predicate}({','.join(f.args)})"
    if isinstance(f, Not):
        return f"!{_render(f.operand)}"
    if isinstance(f, And):
        return " & ".join(_render(op) for op in f.operands)
    if isinstance(f, Or):
        return " | ".join(_render(op) for op in f.operands)
    if isinstance(f, Implies):
        return f"{_render(f.antecedent)} -> {_render(f.consequent)}"
    if isinstance(f, Temporal):
        ival = str(f.interval) if f.interval is not None else ""
        return f"{f.op}{ival}({_render_bare(f.operand)})"
    if isinstance(f, Until):
        ival = str(f.interval) if f.interval is not None else ""
        return f"{_render(f.left)} U{ival} {_render(f.right)}"
    raise TypeError(f"not a formula node: {f!r}")


def collect_vocabulary(f: Formula) -> tuple[set[tuple[str, int]], Counter[str]]:
    """Return (predicates with arity, operator-occurrence multiset) of ``f``.

    Operator names use their ASCII token spellings ("!", "&", "|", "->",
    "G", "F", "X", "P", "U"). An n-ary And/Or counts as n-1 occurrences of
    its connective, matching how often the token appears in concrete syntax
    regardless of operand order.
    """

    predicates: set[tuple[str, int]] = set()
    operators: Counter[str] = Counter()

    def walk(node: Formula) -> None:
        if isinstance(node, Atom):
            predicates.add((node.predicate, node.arity))
        elif isinstance(node, Not):
            operators["!"] += 1
            walk(node.operand)
        elif isinstance(node, And):
            operators["&"] += len(node.operands) - 1
            for op in node.operands:
                walk(op)
        elif isinstance(node, Or):
            operators["|"] += len(node.operands) - 1
            for op in node.operands:
                walk(op)
        elif isinstance(node, Implies):
            operators["->"] += 1
            walk(node.antecedent)
            walk(node.consequent)
        elif isinstance(node, Temporal):
            operators[node.op] += 1
            walk(node.operand)
        elif isinstance(node, Until):
            operators["U"] += 1
            walk(node.left)
            walk(node.right)
        else:
            raise TypeError(f"not a formula node: {node!r}")

    walk(f)
    return predicates, operators


def atoms_of(f: Formula) -> set[Atom]:
    """All ground atoms occurring in ``f``."""

    found: set[Atom] = set()

    def walk(node: Formula) -> None:
        if isinstance(node, Atom):
            found.add(node)
        elif isinstance(node, Not):
            walk(node.operand)
        elif isinstance(node, (And, Or)):
            for op in node.operands:
                walk(op)
        elif isinstance(node, Implies):
            walk(node.antecedent)
            walk(node.consequent)
        elif isinstance(node, Temporal):
            walk(node.operand)
        elif isinstance(node, Until):
            walk(node.left)
            walk(node.right)

    walk(f)
    return found
