"""Legendrian charts: isotropy checks, compatible symplectic forms, jets of the generating function.

A chart is a tuple F = (F_0, ..., F_N) of polynomials in parameters
t1..tn describing a patch of the affine cone over a variety in P^N.  The
variety is Legendrian for an antisymmetric matrix M when the span of F and its
first partials is M-isotropic at every parameter value; since everything is
polynomial, that is a finite list of polynomial identities.
"""

from __future__ import annotations

import itertools
import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exactalg import MultiPoly, linalg, parse_poly


class DegenerateChartError(ValueError):
    pass


class DimensionMismatchError(ValueError):
    pass


def param_names(n: int, prefix: str = "t") -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(1, n + 1))


def _random_point(rng: random.Random, n: int, spread: int = 50) -> list[Fraction]:
    return [Fraction(rng.randint(-spread, spread), rng.randint(1, 7)) for _ in range(n)]


@dataclass
class ChartMap:
    components: list[MultiPoly]
    params: tuple[str, ...]
    base_point: tuple[Fraction, ...] = ()
    seed: int = field(default=0, repr=False)

    def __post_init__(self):
        self.params = tuple(self.params)
        self.components = [c.extend(self.params) if c.variables != self.params else c for c in self.components]
        if not self.base_point:
            self.base_point = tuple(Fraction(0) for _ in self.params)
        self.base_point = tuple(Fraction(x) for x in self.base_point)
        if len(self.base_point) != self.n:
            raise ValueError(f"base point has {len(self.base_point)} coordinates, expected {self.n}")
        if all(c.evaluate(self.base_point) == 0 for c in self.components):
            raise DegenerateChartError("all components vanish at the base point")

    @property
    def N(self) -> int:
        return len(self.components) - 1

    @property
    def n(self) -> int:
        return len(self.params)

    def jet_vectors(self) -> list[list[MultiPoly]]:
        """[F, d_1 F, ..., d_n F]."""
        return [list(self.components)] + [[c.diff(t) for c in self.components] for t in self.params]

    def jet_matrix_at(self, point: Sequence) -> list[list[Fraction]]:
        values = dict(zip(self.params, point))
        return [[p.evaluate(values) for p in row] for row in self.jet_vectors()]

    def generic_rank(self, rng: random.Random | None = None, tries: int = 3) -> int:
        rng = rng or random.Random(self.seed)
        return max(linalg.rank(self.jet_matrix_at(_random_point(rng, self.n))) for _ in range(tries))

    def is_immersive(self) -> bool:
        return self.generic_rank() == self.n + 1

    def scaled(self, s: MultiPoly) -> ChartMap:
        return ChartMap([c * s for c in self.components], self.params, self.base_point)

    def restrict(self, bindings: dict[str, MultiPoly], params: Sequence[str], base_point=()) -> ChartMap:
        return ChartMap([c.substitute(bindings).extend(tuple(params)) for c in self.components], params, base_point)


@dataclass(frozen=True)
class SymplecticForm:
    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        m = tuple(tuple(Fraction(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        size = len(m)
        if any(len(r) != size for r in m):
            raise ValueError("form must be square")
        if size % 2:
            raise ValueError("form must have even size")
        if any(m[i][j] != -m[j][i] for i in range(size) for j in range(size)):
            raise ValueError("form is not antisymmetric")
        if linalg.det(m) == 0:
            raise ValueError("form is degenerate")

    @property
    def size(self) -> int:
        return len(self.matrix)

    @classmethod
    def from_pairs(cls, size: int, pairs: dict[tuple[int, int], Fraction]) -> SymplecticForm:
        m = [[Fraction(0)] * size for _ in range(size)]
        for (a, b), v in pairs.items():
            m[a][b] = Fraction(v)
            m[b][a] = -Fraction(v)
        return cls(tuple(map(tuple, m)))

    @classmethod
    def standard(cls, n: int) -> SymplecticForm:
        """Form on slots 0..2n+1 pairing 0 with 2n+1 (weight -1) and i with n+i (weight +1)."""
        pairs = {(0, 2 * n + 1): Fraction(-1)}
        for i in range(1, n + 1):
            pairs[(i, n + i)] = Fraction(1)
        return cls.from_pairs(2 * n + 2, pairs)

    def pair(self, u: Sequence[MultiPoly], v: Sequence[MultiPoly]) -> MultiPoly:
        total = None
        for a, ua in enumerate(u):
            if ua.is_zero():
                continue
            row = self.matrix[a]
            for b, vb in enumerate(v):
                if row[b] and not vb.is_zero():
                    term = ua * vb * row[b]
                    total = term if total is None else total + term
        return total if total is not None else MultiPoly.zero(u[0].variables)


def _pfaffian4(m) -> Fraction:
    return m[0][1] * m[2][3] - m[0][2] * m[1][3] + m[0][3] * m[1][2]


@dataclass
class FormSearch:
    basis: list[list[list[Fraction]]]
    nondegenerate: bool
    witness: SymplecticForm | None

    @property
    def dimension(self) -> int:
        return len(self.basis)


def find_symplectic_forms(chart: ChartMap, seed: int = 0, attempts: int = 3) -> FormSearch:
    """All antisymmetric M making span{F, dF} isotropic, plus a nondegenerate member if one is found."""
    rng = random.Random(seed)
    if chart.generic_rank(rng) < chart.n + 1:
        raise DegenerateChartError("chart is not immersive at random points")
    size = chart.N + 1
    unknowns = [(a, b) for a in range(size) for b in range(a + 1, size)]
    index = {ab: k for k, ab in enumerate(unknowns)}
    vectors = chart.jet_vectors()
    rows: dict[tuple, list[Fraction]] = {}
    for r, s in itertools.combinations(range(len(vectors)), 2):
        u, v = vectors[r], vectors[s]
        for a in range(size):
            if u[a].is_zero():
                continue
            for b in range(size):
                if a == b or v[b].is_zero():
                    continue
                prod = u[a] * v[b]
                key_ab, sign = ((a, b), 1) if a < b else ((b, a), -1)
                col = index[key_ab]
                for exp, c in prod.terms.items():
                    row = rows.setdefault((r, s, exp), [Fraction(0)] * len(unknowns))
                    row[col] += sign * c
    system = [row for row in rows.values() if any(row)]
    basis_vecs = linalg.nullspace(system, len(unknowns)) if system else linalg.nullspace([], len(unknowns))
    basis = []
    for vec in basis_vecs:
        m = [[Fraction(0)] * size for _ in range(size)]
        for (a, b), c in zip(unknowns, vec):
            m[a][b], m[b][a] = c, -c
        basis.append(m)
    witness = None
    for _ in range(attempts if basis else 0):
        coeffs = [Fraction(rng.randint(-9, 9)) for _ in basis]
        m = [[sum((c * B[i][j] for c, B in zip(coeffs, basis)), Fraction(0)) for j in range(size)] for i in range(size)]
        if size % 2 == 0 and linalg.det(m) != 0:
            witness = SymplecticForm(tuple(map(tuple, m)))
            break
    return FormSearch(basis, witness is not None, witness)


@dataclass
class LegendrianVerdict:
    ok: bool
    violations: list[tuple[str, MultiPoly]]

    def __bool__(self) -> bool:
        return self.ok


def is_legendrian(chart: ChartMap, form: SymplecticForm) -> LegendrianVerdict:
    if form.size != chart.N + 1:
        raise DimensionMismatchError(f"form has size {form.size}, chart has {chart.N + 1} components")
    if chart.N + 1 != 2 * chart.n + 2:
        raise DimensionMismatchError(
            f"{chart.n} parameters in P^{chart.N}: not middle-dimensional (need N+1 = 2n+2)"
        )
    vectors = chart.jet_vectors()
    labels = ["F"] + [f"d{t}F" for t in chart.params]
    violations = []
    for r, s in itertools.combinations(range(len(vectors)), 2):
        value = form.pair(vectors[r], vectors[s])
        if not value.is_zero():
            violations.append((f"w({labels[r]}, {labels[s]})", value))
    return LegendrianVerdict(not violations, violations)


# generating functions


def pfaff_graph(f: MultiPoly, params: Sequence[str] | None = None) -> ChartMap:
    """Graph chart [1, x, grad f, x.grad f - 2f] of the Legendrian generated by f.

    The last slot is what the contact graph becomes in linear coordinates for
    :meth:`SymplecticForm.standard`; it equals f when f is a cubic form.
    """
    params = tuple(params) if params is not None else tuple(sorted(f.variables, key=_natural_key))
    f = f.extend(params)
    xs = MultiPoly.gens(params)
    grad = [f.diff(x) for x in params]
    euler = sum((x * g for x, g in zip(xs, grad)), MultiPoly.zero(params))
    last = euler - f * 2
    one = MultiPoly.constant(1, params)
    return ChartMap([one] + xs + grad + [last], params)


def _natural_key(name: str):
    m = re.match(r"([A-Za-z]*)(\d*)$", name)
    return (m.group(1), int(m.group(2) or 0)) if m else (name, 0)


def graph_parts(chart: ChartMap) -> list[MultiPoly]:
    """The y-slots (n+1..2n) of a chart in graph form; raises if the chart is not one."""
    n = chart.n
    if chart.N != 2 * n + 1:
        raise ValueError("graph form needs N = 2n+1")
    if chart.components[0] != 1 or any(chart.components[i + 1] != MultiPoly.var(t, chart.params) for i, t in enumerate(chart.params)):
        raise ValueError("chart is not in graph form [1, x, y, z]")
    return chart.components[n + 1: 2 * n + 1]


@dataclass
class JetData:
    k: int
    n: int
    entries: dict[tuple[int, ...], Fraction]  # full tensor, indices 0..n-1

    def __getitem__(self, idx) -> Fraction:
        return self.entries[tuple(idx)]

    def is_symmetric(self) -> bool:
        for idx, v in self.entries.items():
            for perm in set(itertools.permutations(idx)):
                if self.entries[perm] != v:
                    return False
        return True

    def symmetric_unique(self) -> dict[tuple[int, ...], Fraction]:
        return {idx: v for idx, v in self.entries.items() if list(idx) == sorted(idx)}

    def is_zero(self) -> bool:
        return not any(self.entries.values())

    def form(self, variables: Sequence[str]) -> MultiPoly:
        """The (k+1)-form sum T[i..] v_i...; variables name v."""
        vs = MultiPoly.gens(variables)
        total = MultiPoly.zero(tuple(variables))
        for idx, c in self.entries.items():
            if c:
                term = MultiPoly.constant(c, variables)
                for i in idx:
                    term = term * vs[i]
                total = total + term
        return total

    def contract(self, v: Sequence, times: int) -> list[Fraction] | Fraction:
        """Plug v into the first ``times`` slots; a covector when one slot is left."""
        n = self.n
        out: dict[tuple[int, ...], Fraction] = {}
        for idx, c in self.entries.items():
            w = c
            for i in idx[:times]:
                w *= v[i]
            rest = idx[times:]
            out[rest] = out.get(rest, 0) + w
        if times == self.k + 1:
            return out.get((), Fraction(0))
        if times == self.k:
            return [out.get((j,), Fraction(0)) for j in range(n)]
        raise ValueError("contract leaves at most one slot")


def fundamental_form(chart: ChartMap, k: int) -> JetData:
    """F_k at the base point: the k-th derivatives of the y-slots, an order-(k+1) tensor."""
    if k < 1:
        raise ValueError("k must be at least 1")
    ys = graph_parts(chart)
    n = chart.n
    point = dict(zip(chart.params, chart.base_point))
    entries: dict[tuple[int, ...], Fraction] = {}
    cache: dict[tuple[int, ...], Fraction] = {}
    for j in range(n):
        for rest in itertools.product(range(n), repeat=k):
            key = (j,) + tuple(sorted(rest))
            if key not in cache:
                p = ys[j]
                for i in rest:
                    p = p.diff(chart.params[i])
                cache[key] = p.evaluate(point)
            entries[(j,) + rest] = cache[key]
    jet = JetData(k, n, entries)
    if not jet.is_symmetric():
        raise ValueError(f"F_{k} is not symmetric: the normal slots are not a gradient")
    return jet


def second_form_quadrics(chart: ChartMap, variables: Sequence[str] | None = None) -> list[MultiPoly]:
    """The n quadrics of |II| at the base point, as forms in v."""
    variables = tuple(variables or param_names(chart.n, "v"))
    vs = MultiPoly.gens(variables)
    # II_j(v) = sum_ab d_a d_b y_j v_a v_b, read off the order-3 jet of f
    jet2 = fundamental_form(chart, 2)
    out = []
    for j in range(chart.n):
        q = MultiPoly.zero(variables)
        for a in range(chart.n):
            for b in range(chart.n):
                c = jet2[(j, a, b)]
                if c:
                    q = q + vs[a] * vs[b] * c
        out.append(q)
    return out


def cubic_part(f: MultiPoly) -> MultiPoly:
    return f.homogeneous_part(3)


def normal_form_at(f: MultiPoly, point: Sequence, params: Sequence[str] | None = None) -> MultiPoly:
    """Generating function of the same Legendrian centred at ``point``.

    Shifts the origin and drops the Taylor terms of order <= 2, which is the
    effect of the affine contact translation followed by the symplectic shear
    (x, y) -> (x, y - Ax).
    """
    params = tuple(params) if params is not None else tuple(sorted(f.variables, key=_natural_key))
    f = f.extend(params)
    shifted = f.substitute({x: MultiPoly.var(x, params) + Fraction(c) for x, c in zip(params, point)})
    shifted = shifted.extend(params)
    return MultiPoly._raw(params, {e: c for e, c in shifted.terms.items() if sum(e) >= 3})


def base_locus_member(f: MultiPoly, v: Sequence, params: Sequence[str] | None = None) -> bool:
    """Whether v lies in the base locus of |II| at 0, with P the cubic part of f.

    Read off the quadrics of |II| at the origin of the graph of P.
    """
    params = tuple(params) if params is not None else tuple(sorted(f.variables, key=_natural_key))
    P = cubic_part(f.extend(params))
    if P.is_zero():
        return True
    quadrics = second_form_quadrics(pfaff_graph(P, params), params)
    point = dict(zip(params, v))
    return all(q.evaluate(point) == 0 for q in quadrics)


@dataclass
class LineContact:
    order: int | None  # first j in 2..kmax with F_j(v, ..., v, .) != 0; None if none
    contained: bool
    values: dict[int, list[Fraction]]


def contact_line_test(f: MultiPoly, v: Sequence, kmax: int, params: Sequence[str] | None = None) -> LineContact:
    """Order of contact of the line through the origin in direction v.

    F_j(v^j, .) is the t^j Taylor coefficient (times j!) of grad f along t v.
    The line lies on the variety exactly when all of them vanish, which for a
    polynomial f is decided by j < deg f.
    """
    v = [Fraction(x) for x in v]
    if not any(v):
        raise ValueError("direction must be nonzero")
    params = tuple(params) if params is not None else tuple(sorted(f.variables, key=_natural_key))
    f = f.extend(params)
    t = "t_line"
    along = {x: MultiPoly.var(t) * c for x, c in zip(params, v)}
    grads = [f.diff(x).substitute(along).extend((t,)) for x in params]
    values: dict[int, list[Fraction]] = {}
    top = max(f.total_degree(), kmax + 1)
    for j in range(1, top + 1):
        values[j] = [g.coefficient((j,)) * math.factorial(j) for g in grads]
    order = next((j for j in range(2, kmax + 1) if any(values[j])), None)
    contained = all(not any(values[j]) for j in range(1, max(f.total_degree(), 1) + 1))
    return LineContact(order, contained, {j: values[j] for j in range(2, kmax + 1)})


# chart files


class ChartFormatError(ValueError):
    pass


def parse_chart(text: str) -> ChartMap:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ChartFormatError("empty chart file")
    head = lines[0].split()
    if len(head) != 2 or not all(h.lstrip("-").isdigit() for h in head):
        raise ChartFormatError("first line must be 'N n'")
    N, n = int(head[0]), int(head[1])
    if N < 1 or n < 1:
        raise ChartFormatError("N and n must be positive")
    if len(lines) < N + 2:
        raise ChartFormatError(f"expected {N + 1} component lines and a base point")
    params = param_names(n)
    try:
        comps = [parse_poly(lines[1 + i], params) for i in range(N + 1)]
    except ValueError as exc:
        raise ChartFormatError(str(exc)) from None
    base = parse_vector(lines[N + 2]) if len(lines) > N + 2 else ()
    if len(lines) > N + 3:
        raise ChartFormatError("trailing lines after the base point")
    try:
        return ChartMap(comps, params, base)
    except ValueError as exc:
        raise ChartFormatError(str(exc)) from None


def parse_vector(text: str) -> tuple[Fraction, ...]:
    body = text.strip()
    if body.startswith("[") and body.endswith("]"):
        body = body[1:-1]
    parts = [p for p in re.split(r"[,\s]+", body) if p]
    try:
        return tuple(Fraction(p) for p in parts)
    except ValueError:
        raise ChartFormatError(f"cannot read vector {text!r}") from None


def format_chart(chart: ChartMap) -> str:
    lines = [f"{chart.N} {chart.n}"] + [str(c) for c in chart.components]
    lines.append("[" + ", ".join(str(x) for x in chart.base_point) + "]")
    return "\n".join(lines) + "\n"
