"""Pointwise evaluation of MTL formulas over finite discrete traces.

A trace is a finite sequence of states; each state is the set of ground
atoms true at that step. Truth is defined recursively at a position, with
temporal operators quantifying over the window of positions their interval
selects, clipped to the trace. End-of-trace behavior follows the usual
finite-trace monitoring conventions: G over an empty window is vacuously
true, F/U over an empty window are false, and X is false at the last
position.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union

from .formula import And, Atom, Formula, Implies, Not, Or, Temporal, Until
from .parser import ParseError, parse_atom

__all__ = [
    "Trace",
    "Verdict",
    "PositionOutOfRange",
    "TraceFormatError",
    "evaluate",
    "monitor",
    "first_violation",
    "load_trace",
    "trace_from_json",
]


class PositionOutOfRange(Exception):
    """Raised when evaluate() is called at a position outside the trace."""


class TraceFormatError(Exception):
    """Raised when a trace document does not match the expected schema."""


@dataclass(frozen=True, slots=True)
class Trace:
    """Finite sequence of states, each a frozenset of ground atoms."""

    states: tuple[frozenset[Atom], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(frozenset(s) for s in self.states))
        for state in self.states:
            for atom in state:
                if not isinstance(atom, Atom):
                    raise TraceFormatError(f"state member is not a ground atom: {atom!r}")

    def __len__(self) -> int:
        return len(self.states)

    @classmethod
    def from_states(cls, states: Iterable[Iterable[Union[Atom, str]]]) -> "Trace":
        """Build a trace from per-state atom collections; strings are parsed."""

        parsed: list[frozenset[Atom]] = []
        for state in states:
            atoms = set()
            for a in state:
                atoms.add(a if isinstance(a, Atom) else parse_atom(a))
            parsed.append(frozenset(atoms))
        return cls(tuple(parsed))


@dataclass(frozen=True, slots=True)
class Verdict:
    holds: bool
    at_position: int
    formula: Formula


def evaluate(f: Formula, trace: Trace, position: int) -> bool:
    """Truth of ``f`` on ``trace`` at ``position`` under pointwise semantics."""

    n = len(trace)
    if position < 0:
        raise PositionOutOfRange(f"position {position} is negative")
    if n > 0 and position >= n:
        raise PositionOutOfRange(f"position {position} outside trace of length {n}")
    return _eval(f, trace.states, n, position)


def monitor(f: Formula, trace: Trace) -> Verdict:
    """Verdict of ``f`` at the start of ``trace``; empty traces are allowed."""

    return Verdict(_eval(f, trace.states, len(trace), 0), 0, f)


def first_violation(f: Formula, trace: Trace) -> int | None:
    """Position witnessing a violation, or None if the formula holds.

    For a top-level always-obligation the result is the first position in
    its window where the operand fails; for any other violated formula the
    evaluation position 0 is reported.
    """

    n = len(trace)
    if _eval(f, trace.states, n, 0):
        return None
    if isinstance(f, Temporal) and f.op == "G":
        for j in _window(0, f.interval, n):
            if not _eval(f.operand, trace.states, n, j):
                return j
    return 0


def _window(i: int, interval, n: int) -> range:
    """Future positions selected by ``interval`` at ``i``, clipped to the trace."""

    if interval is None:
        return range(i, n)
    return range(i + interval.lo, min(i + interval.hi, n - 1) + 1)


def _past_window(i: int, interval, n: int) -> range:
    if interval is None:
        return range(0, min(i, n - 1) + 1)
    return range(max(i - interval.hi, 0), min(i - interval.lo, n - 1) + 1)


def _eval(f: Formula, states: tuple[frozenset[Atom], ...], n: int, i: int) -> bool:
    if isinstance(f, Atom):
        return i < n and f in states[i]
    if isinstance(f, Not):
        return not _eval(f.operand, states, n, i)
    if isinstance(f, And):
        return all(_eval(op, states, n, i) for op in f.operands)
    if isinstance(f, Or):
        return any(_eval(op, states, n, i) for op in f.operands)
    if isinstance(f, Implies):
        return (not _eval(f.antecedent, states, n, i)) or _eval(f.consequent, states, n, i)
    if isinstance(f, Temporal):
        if f.op == "G":
            return all(_eval(f.operand, states, n, j) for j in _window(i, f.interval, n))
        if f.op == "F":
            return any(_eval(f.operand, states, n, j) for j in _window(i, f.interval, n))
        if f.op == "X":
            if f.interval is not None and not (f.interval.lo <= 1 <= f.interval.hi):
                return False
            return i + 1 <= n - 1 and _eval(f.operand, states, n, i + 1)
        if f.op == "P":
            return any(_eval(f.operand, states, n, j) for j in _past_window(i, f.interval, n))
        raise ValueError(f"unknown temporal operator: {f.op!r}")
    if isinstance(f, Until):
        for j in _window(i, f.interval, n):
            if _eval(f.right, states, n, j) and all(
                _eval(f.left, states, n, k) for k in range(i, j)
            ):
                return True
        return False
    raise TypeError(f"not a formula node: {f!r}")


def trace_from_json(doc: object) -> Trace:
    """Build a trace from a ``{"states": [["atom", ...], ...]}`` document."""

    if not isinstance(doc, dict) or "states" not in doc:
        raise TraceFormatError("trace document must be an object with a 'states' field")
    states = doc["states"]
    if not isinstance(states, list) or not all(isinstance(s, list) for s in states):
        raise TraceFormatError("'states' must be an array of arrays of atom strings")
    try:
        return Trace.from_states(states)
    except ParseError as exc:
        raise TraceFormatError(f"bad ground atom in trace: {exc}") from exc
    except TypeError as exc:
        raise TraceFormatError(f"bad state member in trace: {exc}") from exc


def load_trace(path: Union[str, Path]) -> Trace:
    """Read a trace file (JSON document with a 'states' array)."""

    raw = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"trace file is not valid JSON: {exc}") from exc
    return trace_from_json(doc)
