"""Text form of polynomials.

Grammar (whitespace between tokens is ignored)::

    poly   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := INT ['/' INT] | NAME ['^' INT]
    NAME   := [A-Za-z][A-Za-z0-9]*

``format_poly`` writes terms in descending graded-lex order with the
coefficient first, e.g. ``3/2*x0^2*x1 - x2``; ``parse_poly(format_poly(p))``
returns ``p``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

from .poly import MultiPoly

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9]*)|(?P<op>\*\*|[-+*/^]))")


class PolySyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}" + (f" in {text!r}" if text else ""))
        self.position = position


class UnknownVariableError(ValueError):
    def __init__(self, name: str, position: int):
        super().__init__(f"unknown variable {name!r} at position {position}")
        self.name = name
        self.position = position


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    stripped_end = len(text.rstrip())
    while pos < stripped_end:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise PolySyntaxError(f"unexpected character {text[bad]!r}", bad, text)
        kind = m.lastgroup
        start = m.start(kind)
        value = m.group(kind)
        if kind == "op" and value == "**":
            value = "^"
        tokens.append((kind, value, start))
        pos = m.end()
    return tokens


def parse_poly(text: str, variables: Sequence[str]) -> MultiPoly:
    variables = tuple(variables)
    index = {v: i for i, v in enumerate(variables)}
    tokens = _tokenize(text)
    if not tokens:
        raise PolySyntaxError("empty polynomial", 0, text)
    pos = 0
    nv = len(variables)
    terms: dict[tuple[int, ...], Fraction] = {}

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def expect_int() -> int:
        nonlocal pos
        tok = peek()
        if tok is None or tok[0] != "num":
            at = tok[2] if tok else len(text)
            raise PolySyntaxError("expected an integer", at, text)
        pos += 1
        return int(tok[1])

    sign = 1
    tok = peek()
    if tok[0] == "op" and tok[1] in "+-":
        sign = -1 if tok[1] == "-" else 1
        pos += 1
    while True:
        coeff = Fraction(sign)
        exp = [0] * nv
        while True:
            tok = peek()
            if tok is None:
                raise PolySyntaxError("expected a factor", len(text), text)
            kind, value, at = tok
            if kind == "num":
                pos += 1
                num = int(value)
                nxt = peek()
                if nxt is not None and nxt[1] == "/":
                    pos += 1
                    den = expect_int()
                    if den == 0:
                        raise PolySyntaxError("zero denominator", nxt[2], text)
                    coeff *= Fraction(num, den)
                else:
                    coeff *= num
            elif kind == "name":
                if value not in index:
                    raise UnknownVariableError(value, at)
                pos += 1
                k = 1
                nxt = peek()
                if nxt is not None and nxt[1] == "^":
                    pos += 1
                    k = expect_int()
                exp[index[value]] += k
            else:
                raise PolySyntaxError(f"unexpected {value!r}", at, text)
            nxt = peek()
            if nxt is not None and nxt[1] == "*":
                pos += 1
                continue
            break
        key = tuple(exp)
        terms[key] = terms.get(key, 0) + coeff
        tok = peek()
        if tok is None:
            break
        if tok[0] == "op" and tok[1] in "+-":
            sign = -1 if tok[1] == "-" else 1
            pos += 1
            if peek() is None:
                raise PolySyntaxError("dangling operator", tok[2], text)
            continue
        raise PolySyntaxError(f"unexpected {tok[1]!r}", tok[2], text)
    return MultiPoly(variables, terms)


def _format_monomial(variables: Sequence[str], exp: Sequence[int]) -> str:
    parts = []
    for v, e in zip(variables, exp):
        if e == 1:
            parts.append(v)
        elif e > 1:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


def format_poly(p: MultiPoly) -> str:
    if p.is_zero():
        return "0"
    out = []
    for i, (exp, c) in enumerate(p.sorted_terms()):
        mono = _format_monomial(p.variables, exp)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if i == 0:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append(("+ " if c > 0 else "- ") + body)
    return " ".join(out)


def format_monomial(variables: Sequence[str], exp: Sequence[int]) -> str:
    return _format_monomial(variables, exp) or "1"
