"""Chern-class obstructions to Legendrian embeddings and their numerology.

Symbols ``ch1, ch2, ...`` stand for the Chern character components of TX and
``h`` for the hyperplane class.  sigma polynomials and the resultants R_{l,m}
live in the free algebra on those symbols; a :class:`VarietyChernData` supplies
their values in a concrete algebra with an intersection table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .chowring import (
    GradedAlgebraSpec,
    GradedElem,
    exp_series,
    extract_component,
    pair_number,
    pairings,
    substitute_into,
)
from .exactalg import MultiPoly, eliminate_resultant, parse_poly

LEAD = "N"  # stands for n + 1 in symbolic sigma polynomials


def ch_names(k: int) -> tuple[str, ...]:
    return tuple(f"ch{i}" for i in range(1, k + 1))


def formal_algebra(kmax: int, top: int) -> GradedAlgebraSpec:
    """Free algebra on ch1..ch_kmax and h, truncated at ``top``."""
    return GradedAlgebraSpec(tuple((f"ch{i}", 2 * i) for i in range(1, kmax + 1)) + (("h", 2),), top)


@dataclass
class SigmaPolynomial:
    m: int
    n: int | None
    coefficients: list[MultiPoly]  # coefficient of h^i, over ch1..ch_2m (and N when n is None)
    variant: str = "generating"

    def as_poly(self) -> MultiPoly:
        """Sum of coefficient_i * h^i as a single polynomial in ch_k, h (and N)."""
        h = MultiPoly.var("h")
        total = MultiPoly.zero(self.coefficients[0].variables + ("h",))
        for i, c in enumerate(self.coefficients):
            total = total + c * h ** i
        return total

    def as_elem(self, algebra: GradedAlgebraSpec | None = None) -> GradedElem:
        if self.n is None:
            raise ValueError("symbolic leading coefficient; fix n first")
        alg = algebra or formal_algebra(2 * self.m, 4 * self.m)
        return GradedElem(alg, self.as_poly().drop_unused().extend(alg.names))


def sigma_class(n: int | None, m: int, variant: str = "generating") -> SigmaPolynomial:
    """Degree-4m obstruction class.

    ``variant="generating"`` is the component of the generating identity scaled
    by (2m)!, i.e. coefficients (-1)^i (2m)!/i!.  ``variant="binomial"`` uses
    binomial coefficients instead; it is kept only to expose the mismatch with
    the m = 1 identity.  ``n=None`` leaves the leading coefficient as the
    symbol N = n + 1.
    """
    if m < 1:
        raise ValueError("m must be positive")
    names = ch_names(2 * m) + ((LEAD,) if n is None else ())
    gens = {v: MultiPoly.var(v, names) for v in names}
    coeffs = []
    for i in range(2 * m + 1):
        k = 2 * m - i
        if variant == "generating":
            weight = Fraction(math.factorial(2 * m), math.factorial(i))
        elif variant == "binomial":
            weight = Fraction(math.comb(2 * m, i))
        else:
            raise ValueError(f"unknown variant {variant!r}")
        sign = -1 if i % 2 else 1
        if k == 0:
            coeffs.append(_leading(weight, n, names, gens))
        else:
            coeffs.append(gens[f"ch{k}"] * (sign * weight))
    return SigmaPolynomial(m, n, coeffs, variant)


def _leading(weight: Fraction, n: int | None, names, gens) -> MultiPoly:
    # weight * ch_0 + 1 with ch_0 = n; the symbolic form is N when weight = 1
    if n is not None:
        return MultiPoly.constant(weight * n + 1, names)
    if weight != 1:
        raise ValueError("symbolic leading coefficient needs unit weight")
    return gens[LEAD]


def sigma2_closed_form(n: int) -> MultiPoly:
    """2ch2 - 2c1 h + (n+1) h^2 written directly."""
    return parse_poly(f"2*ch2 - 2*ch1*h + {n + 1}*h^2", ("ch1", "ch2", "h"))


def binomial_variant_report() -> tuple[bool, str]:
    """Whether the binomial form of sigma_2 agrees with the m = 1 identity (it does not)."""
    gen = sigma_class(3, 1).as_poly()
    binom = sigma_class(3, 1, "binomial").as_poly()
    c_gen = gen.coefficient(_exp(gen, ch2=1))
    c_bin = binom.coefficient(_exp(binom, ch2=1))
    agree = gen == binom
    return agree, f"coefficient of ch2: binomial form {c_bin}, identity {c_gen}"


def _exp(p: MultiPoly, **powers) -> tuple[int, ...]:
    return tuple(powers.get(v, 0) for v in p.variables)


# Chern character <-> Chern classes (Newton identities on Chern roots)


def chern_from_ch(ch: list[GradedElem], rank: int) -> list[GradedElem]:
    """c_0..c_K from ch_0 = rank, ch_1..ch_K (ch[k] is ch_k; ch[0] ignored)."""
    alg = ch[1].algebra
    kmax = len(ch) - 1
    p = [alg.scalar(rank)] + [ch[k].scale(math.factorial(k)) for k in range(1, kmax + 1)]
    c = [alg.one()]
    for k in range(1, kmax + 1):
        acc = alg.zero()
        for i in range(1, k + 1):
            term = c[k - i] * p[i]
            acc = acc + (term if i % 2 else -term)
        c.append(acc.scale(Fraction(1, k)))
    return c


def ch_from_chern(c: list[GradedElem], rank: int) -> list[GradedElem]:
    alg = c[1].algebra
    kmax = len(c) - 1
    p = [alg.scalar(rank)]
    for k in range(1, kmax + 1):
        # p_k = (-1)^(k-1) k c_k + sum_{i<k} (-1)^(k-1+i) c_{k-i} p_i
        acc = c[k].scale((-1) ** (k - 1) * k)
        for i in range(1, k):
            acc = acc + (c[k - i] * p[i]).scale((-1) ** (k - 1 + i))
        p.append(acc)
    return [alg.scalar(rank)] + [p[k].scale(Fraction(1, math.factorial(k))) for k in range(1, kmax + 1)]


@dataclass
class VarietyChernData:
    name: str
    n: int
    algebra: GradedAlgebraSpec
    ch: list[GradedElem]  # ch[k] = ch_k(TX), ch[0] = n
    h: GradedElem
    legendrian: bool = True
    notes: dict[str, str] = field(default_factory=dict)

    @property
    def c(self) -> list[GradedElem]:
        return chern_from_ch(self.ch, self.n)

    def ch_k(self, k: int) -> GradedElem:
        if k == 0:
            return self.algebra.scalar(self.n)
        if k < len(self.ch):
            return self.ch[k]
        if 2 * k > self.algebra.top_degree:
            return self.algebra.zero()
        raise KeyError(f"no ch_{k} data for {self.name}")

    def number(self, e: GradedElem) -> Fraction:
        return pair_number(extract_component(e, self.algebra.top_degree))


def _from_total_ch(name, n, alg, total: GradedElem, h: GradedElem, **kw) -> VarietyChernData:
    kmax = alg.top_degree // 2
    ch = [alg.scalar(n)] + [extract_component(total, 2 * k) for k in range(1, kmax + 1)]
    if extract_component(total, 0) != alg.scalar(n):
        raise ValueError(f"rank of the tangent character is not {n}")
    return VarietyChernData(name, n, alg, ch, h, **kw)


def catalog(name: str) -> VarietyChernData:
    """Named example data.  ``Pn(3)`` and ``P1xQ(4)`` style names take the dimension."""
    base, _, arg = name.partition("(")
    arg = arg.rstrip(")")
    if base == "Pn":
        n = int(arg)
        alg = GradedAlgebraSpec((("H", 2),), 2 * n, {(n,): 1}, name=name, dim=n)
        H = alg.sym("H")
        total = exp_series(1, H).scale(n + 1) - 1
        return _from_total_ch(name, n, alg, total, H)
    if base == "P1xQ":
        n = int(arg)
        if n < 2:
            raise ValueError("P1xQ(n) needs n >= 2")
        m = n - 1
        table = {(1, m): 2}
        alg = GradedAlgebraSpec((("H", 2), ("M", 2)), 2 * n, table, name=name, dim=n)
        H, M = alg.sym("H"), alg.sym("M")
        total = (exp_series(1, H).scale(2) - 1) + exp_series(1, M).scale(m + 2) - 1 - exp_series(1, M.scale(2))
        return _from_total_ch(name, n, alg, total, H + M)
    if name == "P1xP1_H_2Hprime":
        alg = GradedAlgebraSpec((("H", 2), ("Hp", 2)), 4, {(1, 1): 1}, name=name, dim=2)
        H, Hp = alg.sym("H"), alg.sym("Hp")
        total = exp_series(1, H).scale(2) - 1 + exp_series(1, Hp).scale(2) - 1
        return _from_total_ch(name, 2, alg, total, H + Hp.scale(2))
    if name == "K3blowup12":
        es = tuple((f"E{i}", 2) for i in range(1, 13))
        symbols = (("L", 2), ("Lp", 2)) + es + (("pt", 4),)
        nsym = len(symbols)

        def mono(**k):
            return tuple(k.get(s, 0) for s, _ in symbols)

        table = {mono(L=2): 4, mono(Lp=2): 4, mono(L=1, Lp=1): 12, mono(pt=1): 1}
        for s, _ in es:
            table[mono(**{s: 2})] = -1
        assert all(len(k) == nsym for k in table)
        alg = GradedAlgebraSpec(symbols, 4, table, name=name, dim=2)
        esum = sum((alg.sym(s) for s, _ in es), alg.zero())
        c1 = -esum
        c2 = alg.sym("pt").scale(36)
        ch = [alg.scalar(2), c1, (c1 * c1 - c2.scale(2)).scale(Fraction(1, 2))]
        h = alg.sym("L") + alg.sym("Lp") - esum
        return VarietyChernData(name, 2, alg, ch, h)
    if name == "twisted_cubic":
        alg = GradedAlgebraSpec((("pt", 2),), 2, {(1,): 1}, name=name, dim=1)
        pt = alg.sym("pt")
        return VarietyChernData(name, 1, alg, [alg.scalar(1), pt.scale(2)], pt.scale(3))
    raise KeyError(f"unknown catalog entry {name!r}")


def from_algebra(alg: GradedAlgebraSpec) -> VarietyChernData:
    """Variety data from an algebra file defining ``h`` and either c1..c_n or ch1..ch_n as classes."""
    if alg.dim is None:
        raise ValueError("algebra needs a 'dim' line")
    if alg.intersection_table is None:
        raise ValueError("algebra needs an intersection table")
    n = alg.dim
    if "h" not in alg.classes:
        raise ValueError("algebra must define 'class h = ...'")
    kmax = alg.top_degree // 2
    get = lambda key: alg.classes.get(key, alg.zero())  # noqa: E731
    if any(f"ch{k}" in alg.classes for k in range(1, kmax + 1)):
        ch = [alg.scalar(n)] + [get(f"ch{k}") for k in range(1, kmax + 1)]
    elif any(f"c{k}" in alg.classes for k in range(1, kmax + 1)):
        ch = ch_from_chern([alg.one()] + [get(f"c{k}") for k in range(1, kmax + 1)], n)
    else:
        raise ValueError("algebra must define Chern classes c1.. or ch1..")
    return VarietyChernData(alg.name or "user", n, alg, ch, alg.classes["h"])


CATALOG_NAMES = ("Pn(n)", "P1xQ(n)", "P1xP1_H_2Hprime", "K3blowup12", "twisted_cubic")


def evaluate_on(V: VarietyChernData, poly: MultiPoly) -> GradedElem:
    """Substitute V's ch_k, h (and N = n+1) into a polynomial in those symbols."""
    images = {}
    for v in poly.used_variables():
        if v == "h":
            images[v] = V.h
        elif v == LEAD:
            images[v] = V.algebra.scalar(V.n + 1)
        elif v.startswith("ch"):
            images[v] = V.ch_k(int(v[2:]))
        else:
            raise KeyError(f"cannot evaluate symbol {v}")
    names = tuple(images)
    src = GradedAlgebraSpec(tuple((v, 2) for v in names), 2 * max(1, poly.total_degree()))
    return substitute_into(GradedElem(src, poly.drop_unused().extend(names)), V.algebra, images)


@dataclass
class SigmaCheck:
    residual: GradedElem
    pairings: dict[str, Fraction]

    @property
    def vanishes(self) -> bool:
        return all(v == 0 for v in self.pairings.values())


def check_sigma(V: VarietyChernData, m: int) -> SigmaCheck:
    if 4 * m > V.algebra.top_degree:
        raise ValueError(f"sigma_{2 * m} lives in degree {4 * m}, above the top degree {V.algebra.top_degree}")
    residual = evaluate_on(V, sigma_class(V.n, m).as_poly())
    return SigmaCheck(residual, pairings(residual))


# resultants


def resultant_Rlm(l: int, m: int, n: int | None = None) -> MultiPoly:
    """Res_h(sigma_2l, sigma_2m); symbolic in N = n+1 when n is None."""
    if not 1 <= l < m:
        raise ValueError("need 1 <= l < m")
    a = sigma_class(n, l).as_poly()
    b = sigma_class(n, m).as_poly()
    r = eliminate_resultant(a, b, "h")
    return r.drop_unused()


def cohomological_degrees(p: MultiPoly) -> set[int]:
    weights = {v: (2 * int(v[2:]) if v.startswith("ch") else 2 if v == "h" else 0) for v in p.variables}
    return {sum(e * weights[v] for v, e in zip(p.variables, exp)) for exp in p.terms}


def coefficients_in_lead(p: MultiPoly) -> dict[int, MultiPoly]:
    """Split by powers of N = n+1."""
    if LEAD not in p.variables:
        return {0: p}
    out = p.coefficients_in(LEAD)
    return {k: v.extend(tuple(x for x in v.variables if x != LEAD)) for k, v in out.items()}


# the printed degree-8 table, coefficient of (n+1)^i as monomial strings
C8_TABLE: dict[int, list[tuple[int, str]]] = {
    4: [(1, "ch4^2")],
    3: [(16, "ch2*ch3^3"), (-8, "ch1*ch3*ch4"), (-20, "ch2^2*ch4")],
    2: [(32, "ch1^2*ch2*ch4"), (-16, "ch1*ch2^2*ch4"), (100, "ch2^4")],
    1: [(32, "ch1^3*ch2*ch3"), (-176, "ch1^2*ch2^3"), (-16, "ch1^4*ch4")],
    0: [(468, "ch1^4*ch2^2")],
}


@dataclass
class TableComparison:
    scale: Fraction
    rows: list[tuple[int, str, Fraction, Fraction, str]]  # (power, monomial, printed, computed/scale, status)
    unlisted: list[tuple[int, str, Fraction]]

    @property
    def matches(self) -> int:
        return sum(1 for r in self.rows if r[4] == "match")


def compare_c8_table(variant: str = "generating") -> TableComparison:
    """Term-by-term comparison of R_{1,2} with the printed table, modulo one global scale."""
    if variant == "generating":
        R = resultant_Rlm(1, 2)
    else:
        a = sigma_class(None, 1, variant).as_poly()
        b = sigma_class(None, 2, variant).as_poly()
        R = eliminate_resultant(a, b, "h").drop_unused()
    names = ch_names(4)
    parts = {k: v.extend(names) if v.used_variables() else MultiPoly.zero(names) for k, v in coefficients_in_lead(R).items()}
    lead_exp = (0, 0, 0, 2)
    scale = parts[4].coefficient(lead_exp)
    rows = []
    seen = set()
    for power, entries in sorted(C8_TABLE.items(), reverse=True):
        computed = parts.get(power, MultiPoly.zero(names))
        for printed, mono_text in entries:
            mono = parse_poly(mono_text, names)
            exp = mono.leading_term()[0]
            seen.add((power, exp))
            value = computed.coefficient(exp) / scale
            weight = sum(2 * (i + 1) * e for i, e in enumerate(exp))
            if weight != 16:
                status = f"non-homogeneous (degree {weight})"
            elif value == printed:
                status = "match"
            else:
                status = "mismatch"
            rows.append((power, mono_text, Fraction(printed), value, status))
    unlisted = []
    for power, poly in sorted(parts.items(), reverse=True):
        for exp, c in poly.sorted_terms():
            if (power, exp) not in seen:
                unlisted.append((power, MultiPoly(names, {exp: 1}).__str__(), c / scale))
    return TableComparison(scale, rows, unlisted)


# surface numerology


def codegree_pair(V: VarietyChernData) -> tuple[Fraction, Fraction]:
    if V.n != 2:
        raise ValueError("codegree formulas are for surfaces")
    c = V.c
    h = V.h
    katz = V.number(c[2] - (h * c[1]).scale(2) + (h * h).scale(3))
    leg = V.number(c[2].scale(3) - c[1] * c[1])
    return katz, leg


@dataclass
class RuledVerdict:
    p: int
    q: int
    r: int
    coefficients: tuple[int, int, int]  # constant, k, k^2
    discriminant: int
    status: str  # PASS (k admissible), FAIL (no embedding), UNKNOWN
    k: Fraction | None
    detail: str


def ruled_obstruction(p: int, q: int) -> RuledVerdict:
    if p < 1 or q < 0:
        raise ValueError("need p >= 1 and q >= 0")
    r = p + 1
    a0, a1, a2 = r, -2 * r, q + r
    disc = a1 * a1 - 4 * a2 * a0
    assert disc == -4 * r * q
    k = None
    if disc == 0:
        k = Fraction(-a1, 2 * a2)
    if q == 0:
        status, detail = "PASS", f"double root k={k}: the linear embedding"
    elif p > 1:
        status, detail = "FAIL", "negative discriminant: no rational k, no Legendrian embedding"
    else:
        status = "UNKNOWN"
        detail = "negative discriminant, but the quadratic is only an obstruction for p > 1"
    return RuledVerdict(p, q, r, (a0, a1, a2), disc, status, k, detail)


@dataclass
class Kodaira0Verdict:
    chi: int
    degree: int
    h0: int
    genus: int | None
    admissible: bool


def kodaira0_constraints(chi: int) -> Kodaira0Verdict:
    degree = 8 * chi
    h0 = degree // 2 + chi
    genus = degree // 2 + 1 if chi == 2 else None  # K3: h^2 = 2g - 2
    return Kodaira0Verdict(chi, degree, h0, genus, chi > 1)
