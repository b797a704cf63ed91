"""Recursive-descent parser for the concrete MTL grammar.

Grammar (whitespace insignificant between tokens)::

    formula   := implies
    implies   := or ( ("->" | "→" | "⇒") implies )?
    or        := until ( ("|" | "∨") until )*
    until     := and ( "U" interval? and )?
    and       := unary ( ("&" | "∧") unary )*
    unary     := ("!" | "¬") unary | temporal | atom | "(" formula ")"
    temporal  := ("G"|"F"|"X"|"P") interval? "(" formula ")"
    interval  := "[" nat "," nat "]"
    atom      := ident ( "(" (term ("," term)*)? ")" )?
    term      := ident | nat
    ident     := [a-z][a-z0-9_]*      nat := [0-9]+

Both ASCII and Unicode connective spellings are accepted and produce
identical ASTs. Parsing is total: every malformed input raises
:class:`ParseError` carrying the byte offset of the failure and the set of
tokens that would have been accepted there.
"""

from __future__ import annotations

import re

from .formula import And, Atom, Formula, Implies, Interval, Not, Or, Temporal, Until

__all__ = ["ParseError", "parse_formula", "parse_atom"]


class ParseError(Exception):
    """Raised on any input the grammar rejects."""

    def __init__(self, message: str, offset: int, expected: frozenset[str], found: str = ""):
        self.message = message
        self.offset = offset
        self.expected = expected
        self.found = found
        detail = f"{message} at byte offset {offset}"
        if expected:
            detail += f" (expected {', '.join(sorted(expected))}"
            if found:
                detail += f"; found {found}"
            detail += ")"
        super().__init__(detail)


# Token kinds
_LPAREN = "("
_RPAREN = ")"
_LBRACKET = "["
_RBRACKET = "]"
_COMMA = ","
_NOT = "!"
_AND = "&"
_OR = "|"
_IMPLIES = "->"
_UNTIL = "U"
_TEMPORAL = "TEMPORAL"
_IDENT = "IDENT"
_NAT = "NAT"
_EOF = "EOF"

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<implies>->|→|⇒)
    | (?P<or>\||∨)
    | (?P<and>&|∧)
    | (?P<not>!|¬)
    | (?P<temporal>[GFXP])
    | (?P<until>U)
    | (?P<ident>[a-z][a-z0-9_]*)
    | (?P<nat>[0-9]+)
    | (?P<lparen>\()
    | (?P<rparen>\))
    | (?P<lbracket>\[)
    | (?P<rbracket>\])
    | (?P<comma>,)
    """,
    re.VERBOSE,
)

_GROUP_KIND = {
    "implies": _IMPLIES,
    "or": _OR,
    "and": _AND,
    "not": _NOT,
    "temporal": _TEMPORAL,
    "until": _UNTIL,
    "ident": _IDENT,
    "nat": _NAT,
    "lparen": _LPAREN,
    "rparen": _RPAREN,
    "lbracket": _LBRACKET,
    "rbracket": _RBRACKET,
    "comma": _COMMA,
}


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind: str, text: str, pos: int):
        self.kind = kind
        self.text = text
        self.pos = pos  # character offset into the source


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}",
                _byte_offset(text, pos),
                frozenset({"a token"}),
                found=repr(text[pos]),
            )
        if m.lastgroup != "ws":
            tokens.append(_Token(_GROUP_KIND[m.lastgroup], m.group(), pos))
        pos = m.end()
    tokens.append(_Token(_EOF, "", n))
    return tokens


def _byte_offset(text: str, char_pos: int) -> int:
    return len(text[:char_pos].encode("utf-8"))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, expected: frozenset[str]) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(expected, tok)
        return self.advance()

    def fail(self, expected: frozenset[str], tok: _Token | None = None) -> None:
        tok = tok or self.peek()
        found = "end of input" if tok.kind == _EOF else repr(tok.text)
        raise ParseError(
            "unexpected end of input" if tok.kind == _EOF else f"unexpected token {tok.text!r}",
            _byte_offset(self.text, tok.pos),
            expected,
            found=found,
        )

    # grammar productions, weakest binding first

    def formula(self) -> Formula:
        return self.implies()

    def implies(self) -> Formula:
        left = self.or_level()
        if self.peek().kind == _IMPLIES:
            self.advance()
            right = self.implies()  # right-associative
            return Implies(left, right)
        return left

    def or_level(self) -> Formula:
        operands = [self.until_level()]
        while self.peek().kind == _OR:
            self.advance()
            operands.append(self.until_level())
        if len(operands) == 1:
            return operands[0]
        return Or(tuple(operands))

    def until_level(self) -> Formula:
        left = self.and_level()
        if self.peek().kind == _UNTIL:
            self.advance()
            interval = self.maybe_interval()
            right = self.and_level()
            return Until(left, right, interval)
        return left

    def and_level(self) -> Formula:
        operands = [self.unary()]
        while self.peek().kind == _AND:
            self.advance()
            operands.append(self.unary())
        if len(operands) == 1:
            return operands[0]
        return And(tuple(operands))

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == _NOT:
            self.advance()
            return Not(self.unary())
        if tok.kind == _TEMPORAL:
            return self.temporal()
        if tok.kind == _IDENT:
            return self.atom()
        if tok.kind == _LPAREN:
            self.advance()
            inner = self.formula()
            self.expect(_RPAREN, frozenset({"')'"}))
            return inner
        self.fail(frozenset({"'!'", "'('", "identifier", "'G'", "'F'", "'X'", "'P'"}))
        raise AssertionError("unreachable")

    def temporal(self) -> Formula:
        op_tok = self.advance()
        interval = self.maybe_interval()
        if self.peek().kind != _LPAREN:
            self.fail(frozenset({"'('", "'['"}) if interval is None else frozenset({"'('"}))
        self.advance()
        operand = self.formula()
        self.expect(_RPAREN, frozenset({"')'"}))
        return Temporal(op_tok.text, interval, operand)

    def maybe_interval(self) -> Interval | None:
        if self.peek().kind != _LBRACKET:
            return None
        open_tok = self.advance()
        lo_tok = self.expect(_NAT, frozenset({"number"}))
        self.expect(_COMMA, frozenset({"','"}))
        hi_tok = self.expect(_NAT, frozenset({"number"}))
        self.expect(_RBRACKET, frozenset({"']'"}))
        lo, hi = int(lo_tok.text), int(hi_tok.text)
        if lo > hi:
            raise ParseError(
                f"interval lower bound exceeds upper bound: [{lo},{hi}]",
                _byte_offset(self.text, open_tok.pos),
                frozenset({"interval with lo <= hi"}),
                found=f"[{lo},{hi}]",
            )
        return Interval(lo, hi)

    def atom(self) -> Atom:
        name_tok = self.advance()
        args: list[str] = []
        if self.peek().kind == _LPAREN:
            self.advance()
            if self.peek().kind != _RPAREN:
                args.append(self.term())
                while self.peek().kind == _COMMA:
                    self.advance()
                    args.append(self.term())
            self.expect(_RPAREN, frozenset({"')'", "','"}))
        return Atom(name_tok.text, tuple(args))

    def term(self) -> str:
        tok = self.peek()
        if tok.kind in (_IDENT, _NAT):
            return self.advance().text
        self.fail(frozenset({"identifier", "number"}))
        raise AssertionError("unreachable")

    def expect_eof(self) -> None:
        tok = self.peek()
        if tok.kind != _EOF:
            self.fail(frozenset({"end of input"}), tok)


def parse_formula(text: str) -> Formula:
    """Parse ``text`` into a :class:`Formula`, raising :class:`ParseError` otherwise."""

    p = _Parser(text)
    f = p.formula()
    p.expect_eof()
    return f


def parse_atom(text: str) -> Atom:
    """Parse a single ground atom such as ``turn_signal(ego)`` or ``p``."""

    p = _Parser(text)
    tok = p.peek()
    if tok.kind != _IDENT:
        p.fail(frozenset({"identifier"}))
    atom = p.atom()
    p.expect_eof()
    return atom
