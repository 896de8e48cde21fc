"""Truncated free graded-commutative algebras over Q on even-degree symbols.

Every symbol has an even positive (real) degree, so the algebra is an honest
commutative polynomial ring; products are truncated above ``top_degree``.  An
optional intersection table assigns integers to top-degree monomials and turns
top-degree elements into numbers.  Monomials absent from the table pair to 0.

Text format, one item per line (``#`` starts a comment)::

    name K3blowup12
    dim 2
    top 4
    L 2                      # symbol and degree
    L^2 = 4                  # table entry
    class h = L + Lp - E1    # named class
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exactalg import MultiPoly, parse_poly
from .exactalg.parsing import format_monomial

_KEYWORDS = {"name", "dim", "top", "class"}


class AlgebraMismatchError(ValueError):
    pass


class AlgebraFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class GradedAlgebraSpec:
    symbols: tuple[tuple[str, int], ...]
    top_degree: int
    intersection_table: dict[tuple[int, ...], int] | None = None
    name: str = ""
    dim: int | None = None
    classes: dict[str, "GradedElem"] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        self.symbols = tuple((str(s), int(d)) for s, d in self.symbols)
        names = [s for s, _ in self.symbols]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate symbols in {names}")
        for s, d in self.symbols:
            if d <= 0 or d % 2:
                raise ValueError(f"symbol {s} has degree {d}; only even positive degrees are supported")
        if self.top_degree <= 0 or self.top_degree % 2:
            raise ValueError(f"top degree must be even and positive, got {self.top_degree}")
        if self.symbols and self.top_degree < max(d for _, d in self.symbols):
            raise ValueError("top degree is below a symbol degree")
        if self.intersection_table is not None:
            table = {}
            for mono, value in self.intersection_table.items():
                mono = tuple(mono)
                if self.weight(mono) != self.top_degree:
                    raise ValueError(f"table monomial {self.format_monomial(mono)} is not of top degree")
                table[mono] = int(value)
            self.intersection_table = table

    def __hash__(self):
        return id(self)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.symbols)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.symbols)

    def weight(self, exp: Sequence[int]) -> int:
        return sum(e * d for e, d in zip(exp, self.degrees))

    def format_monomial(self, exp: Sequence[int]) -> str:
        return format_monomial(self.names, exp)

    # element construction

    def zero(self) -> GradedElem:
        return GradedElem(self, MultiPoly.zero(self.names))

    def one(self) -> GradedElem:
        return self.scalar(1)

    def scalar(self, c) -> GradedElem:
        return GradedElem(self, MultiPoly.constant(c, self.names))

    def sym(self, name: str) -> GradedElem:
        if name not in self.names:
            raise KeyError(f"unknown symbol {name!r}")
        return GradedElem(self, MultiPoly.var(name, self.names))

    def parse(self, text: str) -> GradedElem:
        """Parse an expression in the symbols and previously defined classes."""
        if not self.classes:
            return GradedElem(self, parse_poly(text, self.names))
        clash = set(self.classes) & set(self.names)
        if clash:
            raise ValueError(f"class names shadow symbols: {sorted(clash)}")
        p = parse_poly(text, self.names + tuple(self.classes))
        p = p.substitute({k: v.poly for k, v in self.classes.items()})
        return GradedElem(self, p.extend(self.names))

    def table_monomials(self) -> list[tuple[int, ...]]:
        """All monomials of exactly top degree."""
        return [m for m in _monomials_of_weight(self.degrees, self.top_degree)]


def _monomials_of_weight(degrees: Sequence[int], weight: int) -> list[tuple[int, ...]]:
    if not degrees:
        return [()] if weight == 0 else []
    out = []
    d = degrees[0]
    for k in range(weight // d + 1):
        for rest in _monomials_of_weight(degrees[1:], weight - k * d):
            out.append((k,) + rest)
    return out


class GradedElem:
    __slots__ = ("algebra", "poly")

    def __init__(self, algebra: GradedAlgebraSpec, poly: MultiPoly):
        self.algebra = algebra
        if poly.variables != algebra.names:
            poly = poly.extend(algebra.names)
        top = algebra.top_degree
        self.poly = MultiPoly._raw(poly.variables, {e: c for e, c in poly.terms.items() if algebra.weight(e) <= top})

    def _same(self, other) -> GradedElem:
        if isinstance(other, (int, Fraction)):
            return self.algebra.scalar(other)
        if not isinstance(other, GradedElem):
            return NotImplemented
        if other.algebra is not self.algebra:
            raise AlgebraMismatchError("elements of different algebras")
        return other

    def __add__(self, other) -> GradedElem:
        other = self._same(other)
        if other is NotImplemented:
            return other
        return GradedElem(self.algebra, self.poly + other.poly)

    __radd__ = __add__

    def __neg__(self) -> GradedElem:
        return GradedElem(self.algebra, -self.poly)

    def __sub__(self, other) -> GradedElem:
        other = self._same(other)
        if other is NotImplemented:
            return other
        return GradedElem(self.algebra, self.poly - other.poly)

    def __rsub__(self, other) -> GradedElem:
        return (-self) + other

    def __mul__(self, other) -> GradedElem:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._same(other)
        if other is NotImplemented:
            return other
        return GradedElem(self.algebra, _truncated_product(self.poly, other.poly, self.algebra))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> GradedElem:
        if k < 0:
            raise ValueError("negative power")
        result = self.algebra.one()
        for _ in range(k):
            result = result * self
        return result

    def scale(self, r) -> GradedElem:
        return GradedElem(self.algebra, self.poly * Fraction(r))

    def __eq__(self, other) -> bool:
        other = self._same(other)
        if other is NotImplemented:
            return other
        return self.poly == other.poly

    def __hash__(self):
        return hash(self.poly)

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def degrees(self) -> list[int]:
        return sorted({self.algebra.weight(e) for e in self.poly.terms})

    @property
    def components(self) -> dict[int, GradedElem]:
        return {d: extract_component(self, d) for d in self.degrees()}

    def is_homogeneous(self, degree: int | None = None) -> bool:
        ds = self.degrees()
        if not ds:
            return True
        return len(ds) == 1 and (degree is None or ds[0] == degree)

    def __str__(self) -> str:
        return str(self.poly)

    def __repr__(self) -> str:
        return f"GradedElem({self.algebra.name or 'algebra'}, {str(self.poly)!r})"


def _truncated_product(a: MultiPoly, b: MultiPoly, alg: GradedAlgebraSpec) -> MultiPoly:
    top = alg.top_degree
    wa = {e: alg.weight(e) for e in a.terms}
    wb = {e: alg.weight(e) for e in b.terms}
    terms: dict[tuple[int, ...], Fraction] = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            if wa[ea] + wb[eb] > top:
                continue
            e = tuple(x + y for x, y in zip(ea, eb))
            terms[e] = terms.get(e, 0) + ca * cb
    return MultiPoly._raw(a.variables, {e: c for e, c in terms.items() if c})


def gr_combine(a: GradedElem, b: GradedElem | None, op: str, r=None) -> GradedElem:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(r)
    raise ValueError(f"unknown operation {op!r}")


def exp_series(sign: int, h: GradedElem) -> GradedElem:
    """exp(sign*h) truncated at the algebra's top degree; h homogeneous of degree 2."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if h.is_zero():
        return h.algebra.one()
    if not h.is_homogeneous(2):
        raise ValueError("exp_series needs a homogeneous degree-2 element")
    x = h.scale(sign)
    result = h.algebra.one()
    power = h.algebra.one()
    for k in range(1, h.algebra.top_degree // 2 + 1):
        power = power * x
        result = result + power.scale(Fraction(1, math.factorial(k)))
    return result


def extract_component(e: GradedElem, degree: int) -> GradedElem:
    alg = e.algebra
    if degree > alg.top_degree:
        raise ValueError(f"degree {degree} exceeds top degree {alg.top_degree}")
    return GradedElem(alg, MultiPoly._raw(e.poly.variables, {m: c for m, c in e.poly.terms.items() if alg.weight(m) == degree}))


def pair_number(e: GradedElem) -> Fraction:
    alg = e.algebra
    if alg.intersection_table is None:
        raise ValueError("algebra has no intersection table")
    stray = [d for d in e.degrees() if d != alg.top_degree]
    if stray:
        raise ValueError(f"element has components in degrees {stray} below the top degree {alg.top_degree}")
    table = alg.intersection_table
    return sum((c * table.get(m, 0) for m, c in e.poly.terms.items()), Fraction(0))


def pairings(e: GradedElem) -> dict[str, Fraction]:
    """Pair the residual against every monomial of complementary degree."""
    alg = e.algebra
    out = {}
    for d in range(0, alg.top_degree + 1, 2):
        part = extract_component(e, d)
        if part.is_zero():
            continue
        for mono in _monomials_of_weight(alg.degrees, alg.top_degree - d):
            partner = GradedElem(alg, MultiPoly(alg.names, {mono: 1}))
            out[f"[{d}]*{alg.format_monomial(mono) or '1'}"] = pair_number(part * partner)
    return out


def substitute_into(e: GradedElem, target: GradedAlgebraSpec, images: Mapping[str, GradedElem]) -> GradedElem:
    """Ring map sending each symbol of e's algebra to an element of ``target``."""
    missing = [s for s in e.poly.used_variables() if s not in images]
    if missing:
        raise KeyError(f"no image for symbols {missing}")
    result = target.zero()
    cache: dict[tuple[str, int], GradedElem] = {}
    for exp, c in e.poly.terms.items():
        term = target.scalar(c)
        for s, k in zip(e.algebra.names, exp):
            if k:
                if (s, k) not in cache:
                    cache[(s, k)] = images[s] ** k
                term = term * cache[(s, k)]
        result = result + term
    return result


_SYMBOL_LINE = re.compile(r"^([A-Za-z][A-Za-z0-9]*)\s+(-?\d+)$")
_CLASS_LINE = re.compile(r"^class\s+([A-Za-z][A-Za-z0-9]*)\s*=\s*(.+)$")


def parse_algebra(text: str) -> GradedAlgebraSpec:
    symbols: list[tuple[str, int]] = []
    top = None
    dim = None
    name = ""
    table_lines: list[tuple[int, str, str]] = []
    class_lines: list[tuple[int, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _CLASS_LINE.match(line)
        if m:
            class_lines.append((lineno, m.group(1), m.group(2)))
            continue
        if "=" in line:
            lhs, rhs = line.split("=", 1)
            table_lines.append((lineno, lhs.strip(), rhs.strip()))
            continue
        words = line.split()
        if words[0] == "name" and len(words) == 2:
            name = words[1]
            continue
        m = _SYMBOL_LINE.match(line)
        if not m:
            raise AlgebraFormatError(f"cannot read {line!r}", lineno)
        key, value = m.group(1), int(m.group(2))
        if key == "top":
            top = value
        elif key == "dim":
            dim = value
        elif key in _KEYWORDS:
            raise AlgebraFormatError(f"{key!r} is a reserved word", lineno)
        else:
            symbols.append((key, value))
    if top is None:
        if dim is None:
            raise AlgebraFormatError("missing 'top' or 'dim' line", 0)
        top = 2 * dim
    try:
        alg = GradedAlgebraSpec(tuple(symbols), top, None, name=name, dim=dim)
    except ValueError as exc:
        raise AlgebraFormatError(str(exc), 0) from None
    if table_lines:
        table = {}
        for lineno, lhs, rhs in table_lines:
            try:
                mono = parse_poly(lhs, alg.names)
                value = int(rhs)
            except ValueError as exc:
                raise AlgebraFormatError(str(exc), lineno) from None
            if len(mono.terms) != 1 or mono.leading_term()[1] != 1:
                raise AlgebraFormatError(f"{lhs!r} is not a monomial", lineno)
            exp = mono.leading_term()[0]
            if alg.weight(exp) != top:
                raise AlgebraFormatError(f"{lhs!r} is not of top degree {top}", lineno)
            table[exp] = value
        alg.intersection_table = table
    for lineno, cname, expr in class_lines:
        if cname in alg.names:
            raise AlgebraFormatError(f"class {cname!r} shadows a symbol", lineno)
        try:
            alg.classes[cname] = alg.parse(expr)
        except ValueError as exc:
            raise AlgebraFormatError(str(exc), lineno) from None
    return alg


def format_algebra(alg: GradedAlgebraSpec) -> str:
    lines = []
    if alg.name:
        lines.append(f"name {alg.name}")
    if alg.dim is not None:
        lines.append(f"dim {alg.dim}")
    lines.append(f"top {alg.top_degree}")
    lines += [f"{s} {d}" for s, d in alg.symbols]
    for mono, value in sorted((alg.intersection_table or {}).items(), reverse=True):
        lines.append(f"{alg.format_monomial(mono)} = {value}")
    for cname, elem in alg.classes.items():
        lines.append(f"class {cname} = {elem}")
    return "\n".join(lines) + "\n"
