"""Bryant's birational contact map, conormal lifts and the psi parametrization.

Coordinates: points x = [x0..xn] of P^n, hyperplanes y = [y0..yn], and
[w1..wn, z1..zn] on P^{2n-1}.  The forward map

    w_i = x0 y_i (i < n),  w_n = x0 y0 - xn yn,  z_i = x_i yn (i < n),  z_n = x0 yn

is the one for which phi(phi^{-1}(w, z)) = z_n [w, z], with the explicit
inverse below.  Its exceptional locus is x0 yn = 0 and it is undefined
exactly where x0 = yn = 0.
"""

from __future__ import annotations

import itertools
import math
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .contact import ChartMap, SymplecticForm, is_legendrian, parse_vector
from .exactalg import MultiPoly, eliminate_resultant, linalg, parse_poly, substitute_fraction, univariate_gcd
from .exactalg.ffield import FFPoly, reduce_mod_p, reduce_scalar, roots_mod_p, upoly_gcd
from .exactalg.resultant import ResultantError, is_squarefree


class IncidenceError(ValueError):
    pass


class IndeterminateError(ValueError):
    pass


def xs(n: int) -> tuple[str, ...]:
    return tuple(f"x{i}" for i in range(n + 1))


def ys(n: int) -> tuple[str, ...]:
    return tuple(f"y{i}" for i in range(n + 1))


@dataclass(frozen=True)
class FlagPoint:
    x: tuple[Fraction, ...]
    y: tuple[Fraction, ...]

    def __post_init__(self):
        x = tuple(Fraction(v) for v in self.x)
        y = tuple(Fraction(v) for v in self.y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if len(x) != len(y) or len(x) < 3:
            raise ValueError("x and y must have the same length n+1 >= 3")
        if not any(x) or not any(y):
            raise ValueError("zero vector is not a projective point")
        if linalg.dot(x, y):
            raise IncidenceError(f"incidence fails: sum x_i y_i = {linalg.dot(x, y)}")

    @property
    def n(self) -> int:
        return len(self.x) - 1


def phi_forward(p: FlagPoint) -> tuple[Fraction, ...] | None:
    """Image [w, z] of a flag, or None on the indeterminacy locus x0 = yn = 0."""
    n, x, y = p.n, p.x, p.y
    if x[0] == 0 and y[n] == 0:
        return None
    w = [x[0] * y[i] for i in range(1, n)] + [x[0] * y[0] - x[n] * y[n]]
    z = [x[i] * y[n] for i in range(1, n)] + [x[0] * y[n]]
    out = tuple(w + z)
    assert any(out), "phi vanished outside its indeterminacy locus"
    return out


def phi_forward_poly(x: Sequence[MultiPoly], y: Sequence[MultiPoly]) -> list[MultiPoly]:
    n = len(x) - 1
    w = [x[0] * y[i] for i in range(1, n)] + [x[0] * y[0] - x[n] * y[n]]
    z = [x[i] * y[n] for i in range(1, n)] + [x[0] * y[n]]
    return w + z


def phi_inverse(wz: Sequence) -> FlagPoint:
    wz = [Fraction(v) for v in wz]
    if len(wz) % 2 or len(wz) < 4:
        raise ValueError("need 2n coordinates with n >= 2")
    n = len(wz) // 2
    w, z = wz[:n], wz[n:]
    if z[n - 1] == 0:
        raise IndeterminateError("z_n = 0: outside the chart where the inverse is defined")
    zn = z[n - 1]
    s = sum((w[i] * z[i] for i in range(n - 1)), Fraction(0))
    x = [zn] + z[: n - 1] + [-(w[n - 1] + s / zn) / 2]
    y = [(w[n - 1] - s / zn) / 2] + w[: n - 1] + [zn]
    return FlagPoint(tuple(x), tuple(y))


def proportional(u: Sequence, v: Sequence) -> bool:
    return linalg.proportional(list(u), list(v))


def exceptional_stratum(p: FlagPoint) -> str:
    """'regular', 'E1' (x0 = 0), 'E2' (yn = 0) or 'Ind' (both)."""
    e1, e2 = p.x[0] == 0, p.y[p.n] == 0
    return "Ind" if e1 and e2 else "E1" if e1 else "E2" if e2 else "regular"


def same_fiber_predicted(a: FlagPoint, b: FlagPoint) -> bool:
    """Fiber criterion off Ind: equal points on H0 = {x0=0}, or equal hyperplanes through p0 = e_n."""
    if exceptional_stratum(a) == "Ind" or exceptional_stratum(b) == "Ind":
        raise IndeterminateError("fiber criterion applies off the indeterminacy locus")
    if proportional(a.x, b.x) and proportional(a.y, b.y):
        return True
    if a.x[0] == 0 and proportional(a.x, b.x):
        return True
    return a.y[a.n] == 0 and proportional(a.y, b.y)


def same_fiber(a: FlagPoint, b: FlagPoint) -> bool:
    return proportional(phi_forward(a), phi_forward(b))


def indeterminacy_singular_locus(n: int) -> list[MultiPoly]:
    """2x2 minors of the Jacobian of Ind in local coordinates at (p0, H0), plus its equations.

    Coordinates x0, x1..x_{n-1}, z1..z_{n-1}; Ind is x0 = x0 + (x, z) = 0.
    """
    names = ("x0",) + tuple(f"x{i}" for i in range(1, n)) + tuple(f"z{i}" for i in range(1, n))
    g = MultiPoly.gens(names)
    pairing = sum((g[i] * g[n - 1 + i] for i in range(1, n)), MultiPoly.zero(names))
    eqs = [g[0], g[0] + pairing]
    jac = [e.gradient(names) for e in eqs]
    minors = [jac[0][i] * jac[1][j] - jac[0][j] * jac[1][i] for i, j in itertools.combinations(range(len(names)), 2)]
    return eqs + [m for m in minors if not m.is_zero()]


def blowup_chart(n: int) -> list[MultiPoly]:
    """phi composed with the blow-up of Ind near (e1, e_{n-1}^*) in the chart s = 1, divided by yn."""
    if n < 3:
        raise ValueError("the chart needs n >= 3")
    names = ("t",) + tuple(f"x{i}" for i in range(2, n + 1)) + ("y0",) + \
        tuple(f"y{i}" for i in range(2, n - 1)) + (f"y{n}",)
    v = {name: MultiPoly.var(name, names) for name in names}
    one = MultiPoly.constant(1, names)
    yn = v[f"y{n}"]
    x = [v["t"] * yn, one] + [v[f"x{i}"] for i in range(2, n + 1)]
    y = [v["y0"], None] + [v[f"y{i}"] for i in range(2, n - 1)] + [one, yn]
    y[1] = -(x[0] * y[0] + sum((x[i] * y[i] for i in range(2, n + 1) if i != 1), MultiPoly.zero(names)))
    return [c.exact_div(yn) for c in phi_forward_poly(x, y)]


# contact pullback


OneForm = dict[str, MultiPoly]


def _d(p: MultiPoly) -> OneForm:
    return {v: p.diff(v) for v in p.used_variables()}


def _form_add(a: OneForm, b: OneForm, scale=1) -> OneForm:
    out = dict(a)
    for v, c in b.items():
        out[v] = out[v] + c * scale if v in out else c * scale
    return {v: c for v, c in out.items() if not c.is_zero()}


def _form_mul(p: MultiPoly, a: OneForm) -> OneForm:
    return {v: p * c for v, c in a.items()}


def _reduce_on_chart(form: OneForm, var: str, num: MultiPoly, den: MultiPoly, variables) -> OneForm:
    """Impose var = num/den (and its differential) and clear den."""
    dvar = _form_add(_form_mul(den, _d(num)), _form_mul(num, _d(den)), -1)  # times den^-2
    k = max([c.degree(var) for c in form.values()] + [0])
    power = k + 2
    out: OneForm = {}
    for v, c in form.items():
        if v == var:
            continue
        out = _form_add(out, {v: substitute_fraction(c, var, num, den, power)})
    if var in form:
        coeff = substitute_fraction(form[var], var, num, den, power - 2)
        out = _form_add(out, _form_mul(coeff, dvar))
    return {v: c for v, c in out.items() if not c.is_zero()}


@dataclass
class PullbackReport:
    n: int
    factor: Fraction
    normalization: str
    residuals: dict[str, OneForm]  # chart name -> reduced residual

    @property
    def zero(self) -> bool:
        return all(not r for r in self.residuals.values())


def contact_pullback_check(n: int, factor=1, normalization: str = "contraction") -> PullbackReport:
    """phi^* theta - factor * x0 yn theta' reduced modulo the incidence ideal.

    With normalization "contraction" both forms are Euler contractions of the
    symplectic forms, theta = z dw - w dz and theta' = x dy - y dx, and the
    residual vanishes for factor 1.  With "literal", theta' = x dy, which is
    half of that on the incidence variety, so the residual vanishes for factor 2.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if normalization not in ("contraction", "literal"):
        raise ValueError(f"unknown normalization {normalization!r}")
    variables = xs(n) + ys(n)
    X = [MultiPoly.var(v, variables) for v in xs(n)]
    Y = [MultiPoly.var(v, variables) for v in ys(n)]
    wz = phi_forward_poly(X, Y)
    w, z = wz[:n], wz[n:]
    theta: OneForm = {}
    for i in range(n):
        theta = _form_add(theta, _form_mul(z[i], _d(w[i])))
        theta = _form_add(theta, _form_mul(w[i], _d(z[i])), -1)
    theta_prime: OneForm = {}
    for i in range(n + 1):
        part = {f"y{i}": X[i]}
        if normalization == "contraction":
            part[f"x{i}"] = -Y[i]
        theta_prime = _form_add(theta_prime, part)
    residual = _form_add(theta, _form_mul(X[0] * Y[n], theta_prime), -Fraction(factor))
    incidence_tail = sum((X[i] * Y[i] for i in range(1, n + 1)), MultiPoly.zero(variables))
    chart_x0 = _reduce_on_chart(residual, "y0", -incidence_tail, X[0], variables)
    head = sum((X[i] * Y[i] for i in range(n)), MultiPoly.zero(variables))
    chart_yn = _reduce_on_chart(residual, f"x{n}", -head, Y[n], variables)
    return PullbackReport(n, Fraction(factor), normalization, {"x0 != 0": chart_x0, f"y{n} != 0": chart_yn})


# hypersurfaces


@dataclass
class HypersurfaceData:
    F: MultiPoly
    p0: tuple[Fraction, ...]
    H0: tuple[Fraction, ...]
    singular: list[tuple[Fraction, ...]] = field(default_factory=list)

    def __post_init__(self):
        self.p0 = tuple(Fraction(v) for v in self.p0)
        self.H0 = tuple(Fraction(v) for v in self.H0)
        self.singular = [tuple(Fraction(v) for v in s) for s in self.singular]
        names = xs(self.N)
        stray = [v for v in self.F.used_variables() if v not in names]
        if stray:
            raise ValueError(f"F uses {stray}, expected variables among {names}")
        self.F = self.F.extend(names)
        if not self.F.is_homogeneous() or self.F.is_zero():
            raise ValueError("F must be a nonzero homogeneous polynomial")
        for v in [self.H0] + self.singular:
            if len(v) != self.N + 1:
                raise ValueError(f"vector {v} has the wrong length")

    @property
    def N(self) -> int:
        return len(self.p0) - 1

    @property
    def degree(self) -> int:
        return self.F.total_degree()

    @property
    def variables(self) -> tuple[str, ...]:
        return xs(self.N)

    def value(self, point) -> Fraction:
        return self.F.evaluate(list(point))

    def gradient_at(self, point) -> list[Fraction]:
        return [g.evaluate(list(point)) for g in self.F.gradient()]


class HypersurfaceFormatError(ValueError):
    pass


def parse_hypersurface(text: str) -> HypersurfaceData:
    fields: dict[str, str] = {}
    singular: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise HypersurfaceFormatError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "singular":
            singular.append(value)
        elif key in ("F", "p0", "H0"):
            if key in fields:
                raise HypersurfaceFormatError(f"line {lineno}: duplicate {key}")
            fields[key] = value
        else:
            raise HypersurfaceFormatError(f"line {lineno}: unknown key {key!r}")
    missing = [k for k in ("F", "p0", "H0") if k not in fields]
    if missing:
        raise HypersurfaceFormatError(f"missing {', '.join(missing)}")
    try:
        p0 = parse_vector(fields["p0"])
        F = parse_poly(fields["F"], xs(len(p0) - 1))
        return HypersurfaceData(F, p0, parse_vector(fields["H0"]), [parse_vector(s) for s in singular])
    except ValueError as exc:
        raise HypersurfaceFormatError(str(exc)) from None


def format_hypersurface(Z: HypersurfaceData) -> str:
    vec = lambda v: "[" + ", ".join(str(c) for c in v) + "]"  # noqa: E731
    lines = [f"F = {Z.F}", f"p0 = {vec(Z.p0)}", f"H0 = {vec(Z.H0)}"]
    lines += [f"singular = {vec(s)}" for s in Z.singular]
    return "\n".join(lines) + "\n"


# conormal lift


@dataclass
class ConormalChart:
    x: list[MultiPoly]
    y: list[MultiPoly]
    params: tuple[str, ...]
    solved: int
    patch: int

    def incidence(self) -> MultiPoly:
        return sum((a * b for a, b in zip(self.x, self.y)), MultiPoly.zero(self.params))

    def flag_at(self, point) -> FlagPoint:
        values = dict(zip(self.params, point))
        x = [p.evaluate(values) for p in self.x]
        y = [p.evaluate(values) for p in self.y]
        if not any(y):
            raise ValueError(f"singular point of Z at parameters {list(point)}")
        if not any(x):
            raise ValueError(f"parameters {list(point)} leave the patch")
        return FlagPoint(tuple(x), tuple(y))

    def is_singular_at(self, point) -> bool:
        values = dict(zip(self.params, point))
        return not any(p.evaluate(values) for p in self.y)

    def as_chart(self) -> ChartMap:
        return ChartMap(self.x + self.y, self.params, _pick_base(self.x, self.params))


def _pick_base(components, params) -> tuple[Fraction, ...]:
    for cand in itertools.product(range(0, 4), repeat=len(params)):
        if any(c.evaluate(dict(zip(params, cand))) for c in components):
            return tuple(Fraction(c) for c in cand)
    raise ValueError("chart vanishes on the sample grid")


def conormal_chart(Z: HypersurfaceData, solved: int | None = None, patch: int = 0) -> ConormalChart:
    """Parametrize Z^# over the patch x_patch = 1, solving F = 0 for a variable F is linear in."""
    F, names = Z.F, Z.variables
    candidates = [solved] if solved is not None else [k for k in range(Z.N + 1) if k != patch]
    for k in candidates:
        if k == patch:
            raise ValueError("solved variable must differ from the patch variable")
        if F.degree(names[k]) == 1:
            break
    else:
        raise ValueError("F is not linear in any variable off the patch; no rational chart")
    free = [i for i in range(Z.N + 1) if i not in (k, patch)]
    params = tuple(f"t{i}" for i in free)
    bind = {names[patch]: MultiPoly.constant(1, params)}
    bind.update({names[i]: MultiPoly.var(t, params) for i, t in zip(free, params)})

    def on_patch(p: MultiPoly) -> MultiPoly:
        return p.substitute({v: q for v, q in bind.items() if v in p.variables})

    coeffs = F.coefficients_in(names[k])
    a = on_patch(coeffs[1]).extend(params)
    b = on_patch(coeffs.get(0, MultiPoly.zero(names))).extend(params)
    if a.is_zero():
        raise ValueError(f"F does not involve {names[k]} on the patch")
    x = [MultiPoly.zero(params)] * (Z.N + 1)
    x[patch] = a
    for i, t in zip(free, params):
        x[i] = a * MultiPoly.var(t, params)
    x[k] = -b
    # partials are at most linear in x_k, so one common power of a clears x_k = -b/a
    y = [MultiPoly.zero(params) if g.is_zero() else
         substitute_fraction(on_patch(g), names[k], -b, a, 1).extend(params) for g in F.gradient()]
    if all(p.is_zero() for p in y):
        raise ValueError("all partials vanish identically on the patch")
    return ConormalChart(x, y, params, k, patch)


def bryant_form(n: int) -> SymplecticForm:
    """Form on [w1..wn, z1..zn] with theta = sum z dw - w dz."""
    return SymplecticForm.from_pairs(2 * n, {(i, n + i): Fraction(-1) for i in range(n)})


def bryant_transform(Z: HypersurfaceData, solved: int | None = None, patch: int = 0) -> ChartMap:
    cc = conormal_chart(Z, solved, patch)
    n = Z.N
    if (cc.x[0] * cc.y[n]).is_zero():
        raise ValueError("the patch lies in the exceptional locus x0*yn = 0")
    comps = phi_forward_poly(cc.x, cc.y)
    return ChartMap(comps, cc.params, _pick_base(comps, cc.params))


def transverse_at(Z: HypersurfaceData, point: Sequence) -> bool:
    """Is the transformed conormal chart immersive at the lift of a smooth point of Z?

    Off Ind this says Z^# meets the fiber of phi transversely there.
    """
    pt = [Fraction(v) for v in point]
    if Z.value(pt) != 0:
        raise ValueError("point is not on Z")
    for patch in (j for j in range(Z.N + 1) if pt[j]):
        for solved in (k for k in range(Z.N + 1) if k != patch and Z.F.degree(Z.variables[k]) == 1):
            cc = conormal_chart(Z, solved, patch)
            params = [pt[i] / pt[patch] for i in range(Z.N + 1) if i not in (solved, patch)]
            values = dict(zip(cc.params, params))
            if not cc.x[patch].evaluate(values) or cc.is_singular_at(params):
                continue
            comps = phi_forward_poly(cc.x, cc.y)
            chart = ChartMap(comps, cc.params, _pick_base(comps, cc.params))
            jet = chart.jet_matrix_at(params)
            if not any(jet[0]):
                raise IndeterminateError("the lift lies on the indeterminacy locus")
            return linalg.rank(jet) == len(params) + 1
    raise ValueError("no patch with a rational chart through the point")


def random_linear_hypersurface(rng: random.Random, n: int, degree: int) -> HypersurfaceData:
    """Random F = A x_k + B of the given degree in P^n (k random in 1..n), off the exceptional locus."""
    names = xs(n)
    k = rng.randint(1, n)
    others = [v for i, v in enumerate(names) if i != k]

    def random_form(deg):
        terms = {}
        for _ in range(rng.randint(2, 5)):
            exp = [0] * (n + 1)
            for _ in range(deg):
                exp[names.index(rng.choice(others))] += 1
            terms[tuple(exp)] = rng.choice([c for c in range(-5, 6) if c])
        return MultiPoly(names, terms)

    p0 = tuple(Fraction(int(i == n)) for i in range(n + 1))
    H0 = tuple(Fraction(int(i == 0)) for i in range(n + 1))
    while True:
        A = random_form(degree - 1)
        if A.is_zero():
            continue
        Z = HypersurfaceData(A * MultiPoly.var(names[k], names) + random_form(degree), p0, H0)
        # reject surfaces whose lift sits inside x0*yn = 0, e.g. planes through p0
        cc = conormal_chart(Z)
        if not (cc.x[0] * cc.y[n]).is_zero():
            return Z


# psi parametrization


def _hom_check(P: MultiPoly) -> int:
    if P.is_zero() or not P.is_homogeneous():
        raise ValueError("P must be a nonzero homogeneous polynomial")
    return P.total_degree()


def psi_chart(P: MultiPoly, params: Sequence[str] | None = None) -> ChartMap:
    """[1, x, grad P, P] on the patch x0 = 1; requires d != 2."""
    d = _hom_check(P)
    if d == 2:
        raise ValueError("psi is not used for d = 2")
    params = tuple(params) if params is not None else tuple(sorted(P.variables, key=_natural))
    P = P.extend(params)
    one = MultiPoly.constant(1, params)
    comps = [one] + MultiPoly.gens(params) + P.gradient(params) + [P]
    return ChartMap(comps, params)


def psi_form(n: int, d: int) -> SymplecticForm:
    """A form for which psi_chart of any degree-d P in n variables is Legendrian."""
    pairs = {(0, 2 * n + 1): Fraction(-(d - 2))}
    for i in range(1, n + 1):
        pairs[(i, n + i)] = Fraction(1)
    return SymplecticForm.from_pairs(2 * n + 2, pairs)


def psi_map_homogeneous(P: MultiPoly) -> list[MultiPoly]:
    """[x0^d, x0^(d-1) x, x0 grad P, P] in x0 and P's variables."""
    d = _hom_check(P)
    params = tuple(sorted(P.variables, key=_natural))
    allv = ("x0",) + params if "x0" not in params else params
    x0 = MultiPoly.var("x0", allv)
    P = P.extend(allv)
    return [x0 ** d] + [x0 ** (d - 1) * MultiPoly.var(v, allv) for v in params] + \
        [x0 * P.diff(v) for v in params] + [P]


def _natural(name: str):
    m = re.match(r"([A-Za-z]*)(\d*)$", name)
    return (m.group(1), int(m.group(2) or 0)) if m else (name, 0)


def self_duality_check(P: MultiPoly) -> Fraction | None:
    """c with P(grad P) = c P^(d-1), or None."""
    d = _hom_check(P)
    params = tuple(sorted(P.variables, key=_natural))
    P = P.extend(params)
    composed = P.substitute({v: P.diff(v) for v in params}).extend(params)
    if composed.is_zero():
        return None
    target = P ** (d - 1)
    exp, c = composed.leading_term()
    ratio = c / target.coefficient(exp) if target.coefficient(exp) else None
    if ratio is None or composed != target * ratio:
        return None
    return ratio


# plane sections and tangent lines through p0


@dataclass
class PlaneFrame:
    v0: tuple[Fraction, ...]
    p0: tuple[Fraction, ...]
    v2: tuple[Fraction, ...]

    def point(self, s) -> list[Fraction]:
        return [s[0] * a + s[1] * b + s[2] * c for a, b, c in zip(self.v0, self.p0, self.v2)]


S = ("s0", "s1", "s2")


def plane_curve(Z: HypersurfaceData, frame: PlaneFrame) -> MultiPoly:
    """C(s0, s1, s2) = F(s0 v0 + s1 p0 + s2 v2)."""
    s = MultiPoly.gens(S)
    coords = [s[0] * a + s[1] * b + s[2] * c for a, b, c in zip(frame.v0, frame.p0, frame.v2)]
    return Z.F.substitute(dict(zip(Z.variables, coords))).extend(S)


def _frames(Z: HypersurfaceData, rng: random.Random):
    if Z.N != 3:
        raise ValueError("plane sections are implemented for surfaces in P^3")
    if linalg.dot(Z.H0, Z.p0) != 0:
        raise ValueError("p0 must lie on H0")
    basis = linalg.nullspace([list(Z.H0)], 4)
    first = True
    while True:
        if first:
            combos = basis
            first = False
        else:
            combos = []
            for _ in range(2):
                coeffs = [rng.randint(-5, 5) for _ in basis]
                combos.append([sum(c * b[j] for c, b in zip(coeffs, basis)) for j in range(4)])
        # complete p0 to a basis of H0
        picks = [v for v in combos if linalg.rank([list(Z.p0), v]) == 2]
        for v0, v2 in itertools.combinations(picks, 2):
            if linalg.rank([list(Z.p0), v0, v2]) == 3:
                yield PlaneFrame(tuple(v0), Z.p0, tuple(v2))
                break


@dataclass
class IndeterminacyResult:
    poly: MultiPoly  # univariate in s0 (s2 = 1)
    degree: int
    squarefree: bool
    frame: PlaneFrame
    curve: MultiPoly

    @property
    def expected_degree(self) -> int:
        d = self.curve.total_degree()
        return d * (d - 1)


def _section_checks(Z: HypersurfaceData):
    if Z.value(Z.p0) == 0:
        raise ValueError("p0 lies on Z")


def indeterminacy_points(Z: HypersurfaceData, seed: int = 0, attempts: int = 8) -> IndeterminacyResult:
    """Eliminate s1 from C = dC/ds1 = 0: roots are the points of C whose tangent passes through p0."""
    _section_checks(Z)
    rng = random.Random(seed)
    frames = _frames(Z, rng)
    d = Z.degree
    last = None
    for _ in range(attempts):
        frame = next(frames)
        C = plane_curve(Z, frame)
        if C.is_zero():
            raise ValueError("H0 is a component of Z: C is not reduced")
        dehom = C.substitute({"s2": 1}).extend(("s0", "s1"))
        D = eliminate_resultant(dehom, dehom.diff("s1"), "s1")
        D = D.extend(("s0",)) if not D.used_variables() or D.used_variables() == ("s0",) else D
        if D.is_zero():
            raise ValueError("C = Z ∩ H0 is not reduced (resultant vanishes identically)")
        last = (frame, C, D)
        if D.degree("s0") == d * (d - 1):
            break
    frame, C, D = last
    D = D.extend(("s0",))
    lead = D.leading_term()[1]
    D = D * (1 / lead)
    return IndeterminacyResult(D, D.degree("s0"), is_squarefree(D, "s0"), frame, C)


def _eliminated(C: MultiPoly, other: MultiPoly) -> MultiPoly:
    a = C.substitute({"s2": 1}).extend(("s0", "s1"))
    b = other.substitute({"s2": 1}).extend(("s0", "s1"))
    if b.degree("s1") <= 0:
        return (b ** a.degree("s1")).extend(("s0",)) if b.used_variables() else b.extend(("s0",))
    return eliminate_resultant(a, b, "s1").extend(("s0",))


# second fundamental form witness


@dataclass
class SecondFormWitness:
    q00: Fraction
    q03: Fraction
    q33: Fraction
    frame: list[tuple[Fraction, ...]]

    @property
    def passed(self) -> bool:
        return self.q33 != 0


class NormalizationError(ValueError):
    pass


def second_form_witness(Z: HypersurfaceData, point: Sequence) -> SecondFormWitness:
    """Quadratic jet of the local graph at a point of Z on H0 whose tangent plane contains p0."""
    pt = [Fraction(v) for v in point]
    if Z.N != 3:
        raise NormalizationError("witness is implemented for surfaces in P^3")
    if Z.value(pt) != 0:
        raise NormalizationError("point is not on Z")
    if linalg.dot(Z.H0, pt) != 0:
        raise NormalizationError("point is not on H0")
    grad = Z.gradient_at(pt)
    if not any(grad):
        raise NormalizationError("point is singular on Z")
    if linalg.dot(grad, Z.p0) != 0:
        raise NormalizationError("tangent plane at the point does not contain p0")
    T = linalg.nullspace([grad], 4)
    H = linalg.nullspace([list(Z.H0)], 4)
    frame = None
    for c0 in T + [[a + b for a, b in zip(u, v)] for u, v in itertools.combinations(T, 2)]:
        if linalg.dot(Z.H0, c0) == 0:
            continue
        for c2 in H + [[a + b for a, b in zip(u, v)] for u, v in itertools.combinations(H, 2)]:
            if linalg.dot(grad, c2) == 0:
                continue
            cols = [c0, pt, c2, list(Z.p0)]
            if linalg.det(cols) != 0:
                frame = cols
                break
        if frame:
            break
    if frame is None:
        raise NormalizationError("could not build a local frame at the point")
    u = ("u0", "u2", "u3")
    U = MultiPoly.gens(u)
    coords = [U[0] * frame[0][j] + frame[1][j] + U[1] * frame[2][j] + U[2] * frame[3][j] for j in range(4)]
    f = Z.F.substitute(dict(zip(Z.variables, coords))).extend(u)
    w = jet_witness(f, u)
    return SecondFormWitness(w.q00, w.q03, w.q33, [tuple(c) for c in frame])


def jet_witness(f: MultiPoly, variables: Sequence[str] = ("x0", "x2", "x3")) -> SecondFormWitness:
    """q-coefficients of a local equation f(a, b, c) = 0 with f(0) = 0 and df = lambda db at 0.

    Solving for b gives b = -(q00 a^2 + 2 q03 a c + q33 c^2) + ...; the sign is
    dropped so that f = b + c^2 has q33 = 1.
    """
    a, b, c = variables
    f = f.extend(tuple(variables) + tuple(v for v in f.variables if v not in variables))
    extra = [v for v in f.used_variables() if v not in variables]
    if extra:
        raise NormalizationError(f"local equation uses unexpected variables {extra}")
    origin = {v: 0 for v in variables}
    if f.evaluate(origin) != 0:
        raise NormalizationError("origin is not on the local hypersurface")
    lin = f.diff(b).evaluate(origin)
    if lin == 0 or f.diff(a).evaluate(origin) or f.diff(c).evaluate(origin):
        raise NormalizationError("tangent plane at the origin is not b = 0")
    q = lambda s, t: f.diff(s).diff(t).evaluate(origin) / (2 * lin)  # noqa: E731
    return SecondFormWitness(q(a, a), q(a, c), q(c, c), [])


def rational_indeterminacy_instance(seed: int, degree: int = 4) -> tuple[HypersurfaceData, tuple[Fraction, ...]]:
    """A random surface with a rational point on H0 = {x0=0} whose tangent plane contains p0 = e3."""
    rng = random.Random(seed)
    names = xs(3)
    exps = [e for e in itertools.product(range(degree + 1), repeat=4) if sum(e) == degree]
    pt = (Fraction(0), Fraction(1), Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-3, 3)))
    while True:
        terms = {e: rng.randint(-6, 6) for e in exps}
        F = MultiPoly(names, terms)
        # correct two coefficients: x1^d fixes F(pt) = 0, x1^(d-1) x3 fixes dF/dx3(pt) = 0
        e_a = (0, degree, 0, 0)
        e_b = (0, degree - 1, 0, 1)
        da = MultiPoly(names, {e_a: 1})
        db = MultiPoly(names, {e_b: 1})
        g = [F.evaluate(pt), F.diff("x3").evaluate(pt)]
        m = [[da.evaluate(pt), db.evaluate(pt)], [da.diff("x3").evaluate(pt), db.diff("x3").evaluate(pt)]]
        sol = linalg.matvec(linalg.inverse(m), [-g[0], -g[1]])
        F = F + da * sol[0] + db * sol[1]
        Z = HypersurfaceData(F, (0, 0, 0, 1), (1, 0, 0, 0))
        if Z.value(Z.p0) != 0 and any(Z.gradient_at(pt)):
            return Z, pt


def kummer_from_node(node: Sequence = (1, 2, 3, 5), p0=(0, 0, 0, 1), H0=(1, 2, 5, 0)) -> HypersurfaceData:
    """Quartic in the Heisenberg-invariant family singular at the 16 images of a rational node.

    The family is a(x0^4 + x1^4 + x2^4 + x3^4) + b(x0^2 x3^2 + x1^2 x2^2)
    + c(x1^2 x3^2 + x0^2 x2^2) + e(x2^2 x3^2 + x0^2 x1^2) + f x0 x1 x2 x3;
    singularity at the node is linear in (b, c, e, f).
    """
    node = [Fraction(v) for v in node]
    x0, x1, x2, x3 = MultiPoly.gens(xs(3))
    basis = [
        x0 ** 4 + x1 ** 4 + x2 ** 4 + x3 ** 4,
        x0 ** 2 * x3 ** 2 + x1 ** 2 * x2 ** 2,
        x1 ** 2 * x3 ** 2 + x0 ** 2 * x2 ** 2,
        x2 ** 2 * x3 ** 2 + x0 ** 2 * x1 ** 2,
        x0 * x1 * x2 * x3,
    ]
    rows = [[b.diff(v).evaluate(node) for b in basis[1:]] for v in xs(3)]
    rhs = [-basis[0].diff(v).evaluate(node) for v in xs(3)]
    try:
        coeffs = linalg.matvec(linalg.inverse(rows), rhs)
    except ZeroDivisionError:
        raise ValueError(f"node {list(node)} does not determine a unique quartic") from None
    F = basis[0] + sum((b * c for b, c in zip(basis[1:], coeffs)), MultiPoly.zero(xs(3)))
    F = F * math.lcm(*(c.denominator for c in F.terms.values()))
    orbit = set()
    for perm in ((0, 1, 2, 3), (1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0)):
        for signs in ((1, 1, 1, 1), (1, 1, -1, -1), (1, -1, 1, -1), (1, -1, -1, 1)):
            orbit.add(tuple(signs[i] * node[perm[i]] for i in range(4)))
    return HypersurfaceData(F, p0, H0, sorted(orbit))


# general position


@dataclass
class Check:
    name: str
    status: str
    detail: str


def _binary_gcd_degree(a: MultiPoly, b: MultiPoly) -> int:
    return univariate_gcd(a.extend(("s0",)), b.extend(("s0",)), "s0").degree("s0")


def _singular_at_infinity(C: MultiPoly) -> bool:
    """Do the partials of C share a zero on the line s2 = 0 (lost by dehomogenizing)?"""
    parts = [C.diff(v).substitute({"s2": 0}) for v in S]
    if all(p.evaluate({"s0": 0, "s1": 1}) == 0 for p in parts):
        return True
    line = [p.substitute({"s0": 1}).extend(("s1",)) for p in parts]
    nonzero = [p for p in line if not p.is_zero()]
    if not nonzero:
        return True
    g = nonzero[0]
    for p in nonzero[1:]:
        g = univariate_gcd(g, p, "s1")
    return g.degree("s1") > 0


def _smooth_certificate(Z: HypersurfaceData, rng: random.Random) -> Check:
    """Certify C smooth: its three partials have no common zero, shown by projection."""
    frames = _frames(Z, rng)
    for attempt in range(3):
        frame = next(frames)
        if attempt:
            # move the projection centre off p0 inside H0
            k = rng.randint(1, 5)
            frame = PlaneFrame(frame.v0, tuple(a + k * b for a, b in zip(frame.p0, frame.v2)), frame.v2)
            if Z.value(frame.p0) == 0:
                continue
        C = plane_curve(Z, frame)
        if C.is_zero():
            return Check("section curve smooth", "FAIL", "H0 is a component of Z")
        d1 = C.diff("s1")
        try:
            r0 = _eliminated(d1, C.diff("s0"))
            r2 = _eliminated(d1, C.diff("s2"))
        except ResultantError:
            continue
        if r0.is_zero() or r2.is_zero():
            continue
        if _binary_gcd_degree(r0, r2) == 0 and not _singular_at_infinity(C):
            return Check("section curve smooth", "PASS", f"partials of C have no common zero (centre {attempt + 1})")
    return Check("section curve smooth", "FAIL", "no projection centre separates the partials: C is singular")


def _tangent_planes_mod(Z: HypersurfaceData, q: int) -> tuple[int, list[int] | None]:
    """Count smooth F_q-points with tangent plane through p0; return a repeated plane if any."""
    Fq = reduce_mod_p(Z.F, q)
    grads = [reduce_mod_p(g, q) for g in Z.F.gradient()]
    p0 = [reduce_scalar(c, q) for c in Z.p0]
    seen: dict[tuple[int, ...], tuple[int, ...]] = {}
    for lead in range(4):
        # points whose last nonzero coordinate is x_lead = 1
        size = q ** lead
        free = [g.ravel() for g in np.meshgrid(*[np.arange(q)] * lead, indexing="ij")] if lead else []
        arrays = free + [np.ones(size, dtype=np.int64)] + [np.zeros(size, dtype=np.int64)] * (3 - lead)
        gvals = [g.evaluate_grid(arrays) for g in grads]
        polar = sum(p0[i] * gvals[i] for i in range(4)) % q == 0
        keep = (Fq.evaluate_grid(arrays) == 0) & polar & np.any(np.stack(gvals) != 0, axis=0)
        for j in np.nonzero(keep)[0]:
            g = [int(v[j]) for v in gvals]
            k = max(i for i in range(4) if g[i])
            inv = pow(g[k], -1, q)
            key = tuple(c * inv % q for c in g)
            pt = tuple(int(a[j]) for a in arrays)
            if key in seen and seen[key] != pt:
                return len(seen), list(key)
            seen[key] = pt
    return len(seen), None


def _bitangent_planes_sampled(Z: HypersurfaceData, primes: Sequence[int]) -> Check:
    name = "no bitangent plane through p0"
    total = 0
    for q in primes:
        try:
            count, repeated = _tangent_planes_mod(Z, q)
        except ArithmeticError as exc:
            return Check(name, "UNKNOWN", f"reduction mod {q} failed: {exc}")
        if repeated is not None:
            return Check(name, "UNKNOWN", f"tangent plane {repeated} over F_{q} touches Z twice")
        total += count
    if not total:
        return Check(name, "UNKNOWN", f"no tangent planes through p0 found over F_q, q in {list(primes)}")
    return Check(name, "SAMPLED", f"sampled, not certified: {total} tangent planes through p0 over F_q, "
                                  f"q in {list(primes)}, none repeated")


def general_position_report(Z: HypersurfaceData, seed: int = 0, sample_primes: Sequence[int] = (53, 61)) -> list[Check]:
    rng = random.Random(seed)
    checks = []
    fp0 = Z.value(Z.p0)
    checks.append(Check("p0 not on Z", "PASS" if fp0 else "FAIL", f"F(p0) = {fp0}"))
    on_h0 = linalg.dot(Z.H0, Z.p0) == 0
    checks.append(Check("p0 on H0", "PASS" if on_h0 else "FAIL", f"H0(p0) = {linalg.dot(Z.H0, Z.p0)}"))
    bad = [s for s in Z.singular if linalg.dot(Z.H0, s) == 0]
    fake = [s for s in Z.singular if any(Z.gradient_at(s)) or Z.value(s)]
    if fake:
        checks.append(Check("listed singular points are singular", "FAIL", f"{len(fake)} listed points are not singular"))
    checks.append(Check(
        "H0 misses listed singular points",
        "FAIL" if bad else "PASS",
        f"{len(bad)} of {len(Z.singular)} listed singular points on H0",
    ))
    if not fp0 or not on_h0 or Z.N != 3:
        reason = "needs p0 off Z, p0 on H0 and a surface in P^3"
        for nm in ("section curve smooth", "tangent line count", "no bitangent line of the section through p0",
                   "q33 != 0 at indeterminacy points", "no bitangent plane through p0"):
            checks.append(Check(nm, "UNKNOWN", reason))
        return checks
    checks.append(_smooth_certificate(Z, rng))
    try:
        res = indeterminacy_points(Z, seed)
    except ValueError as exc:
        checks.append(Check("tangent line count", "FAIL", str(exc)))
        return checks
    d = Z.degree
    checks.append(Check(
        "tangent line count",
        "PASS" if res.degree == d * (d - 1) else "FAIL",
        f"degree {res.degree}, expected d(d-1) = {d * (d - 1)}",
    ))
    flex = _eliminated(res.curve, res.curve.diff("s1").diff("s1"))
    flex_free = not flex.is_zero() and _binary_gcd_degree(res.poly, flex) == 0
    if res.squarefree:
        checks.append(Check("no bitangent line of the section through p0", "PASS", "tangency polynomial is squarefree"))
    elif flex_free:
        checks.append(Check("no bitangent line of the section through p0", "FAIL", "repeated root with no flex: a bitangent line or a singular point of C"))
    else:
        checks.append(Check("no bitangent line of the section through p0", "UNKNOWN", "repeated root of the tangency polynomial"))
    if res.squarefree or flex_free:
        checks.append(Check("q33 != 0 at indeterminacy points", "PASS",
                            "no point of C with d2C/ds1^2 = 0 among the tangency points"))
    else:
        checks.append(Check("q33 != 0 at indeterminacy points", "UNKNOWN",
                            "tangency and flex conditions share a projected root"))
    checks.append(_bitangent_planes_sampled(Z, sample_primes))
    return checks


# gradient map fibers


class BudgetExceededError(RuntimeError):
    pass


def _eliminate_system(eqs: list[MultiPoly], order: list[str], budget: int) -> list[list[MultiPoly]]:
    """Triangularize by successive resultants; level i holds equations free of order[:i]."""
    levels = [eqs]
    current = eqs
    for v in order[:-1]:
        with_v = [e for e in current if e.degree(v) > 0]
        without = [e for e in current if e.degree(v) <= 0]
        if not with_v:
            raise ArithmeticError(f"no equation involves {v}")
        pivot = min(with_v, key=lambda e: (e.degree(v), len(e.terms)))
        nxt = list(without)
        for e in with_v:
            if e is pivot:
                continue
            r = eliminate_resultant(pivot, e, v).drop_unused()
            if r.is_zero():
                raise ArithmeticError("resultant vanished identically: fiber is not finite")
            if r.total_degree() > budget:
                raise BudgetExceededError(f"elimination degree {r.total_degree()} exceeds budget {budget}")
            nxt.append(r)
        nxt = [e for e in nxt if not e.is_constant() or e.is_zero()]
        current = nxt
        levels.append(current)
    return levels


def _solve_mod_p(levels, order, prime, rng) -> list[dict[str, int]]:
    partial = [{}]
    for depth in range(len(order) - 1, -1, -1):
        v = order[depth]
        eqs = levels[depth]
        out = []
        for sol in partial:
            g = None
            for e in eqs:
                if e.degree(v) <= 0:
                    continue
                ff = reduce_mod_p(e.extend(tuple(dict.fromkeys(e.variables))), prime)
                coeffs = ff.univariate_in(v, sol) if v in ff.variables else []
                g = coeffs if g is None else upoly_gcd(g, coeffs, prime)
            if g is None or not g:
                raise ArithmeticError(f"variable {v} is not determined by the eliminated system")
            for r in roots_mod_p(g, prime, rng):
                out.append({**sol, v: r})
        partial = out
    return partial


def gradient_degree_sample(P: MultiPoly, prime: int = 1000003, trials: int = 20, seed: int = 0,
                           budget: int = 256) -> tuple[int, list[int]]:
    """Modal number of F_p-rational projective points x with grad P(x) proportional to a random target.

    Targets are y = grad P(a) for random small integer vectors a, so every
    fiber is nonempty.  The affine system grad P(x) = y is triangularized by
    resultants over Q (after a random linear change of variables), solved
    modulo the prime, and the affine solutions with P(x) != 0 are divided by
    the number of (d-1)-th roots of unity in F_p.
    """
    if trials < 10:
        raise ValueError("use at least 10 trials")
    d = _hom_check(P)
    if d < 2:
        raise ValueError("gradient map of a linear form is constant")
    params = tuple(sorted(P.variables, key=_natural))
    P = P.extend(params)
    n = len(params)
    rng = random.Random(seed)
    grad = P.gradient(params)
    counts = []
    for _ in range(trials):
        a = [Fraction(rng.randint(1, 40)) for _ in range(n)]
        target = [g.evaluate(a) for g in grad]
        for attempt in range(4):
            change = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)] if attempt == 0 else \
                [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
            if linalg.det(change) == 0:
                continue
            new = tuple(f"u{i}" for i in range(n))
            U = MultiPoly.gens(new)
            subs = {v: sum((U[j] * change[i][j] for j in range(n)), MultiPoly.zero(new)) for i, v in enumerate(params)}
            eqs = [(g.substitute(subs) - t).extend(new) for g, t in zip(grad, target)]
            try:
                levels = _eliminate_system(eqs, list(new), budget)
                sols = _solve_mod_p(levels, list(new), prime, rng)
                break
            except ArithmeticError:
                continue
        else:
            raise ArithmeticError("could not triangularize the gradient system (fiber may be positive dimensional)")
        Pp = reduce_mod_p(P, prime)
        gp = [reduce_mod_p(g, prime) for g in grad]
        tp = [reduce_scalar(t, prime) for t in target]
        affine = set()
        cm = [[reduce_scalar(c, prime) for c in row] for row in change]
        for s in sols:
            u = [s[f"u{i}"] for i in range(n)]
            x = [sum(cm[i][j] * u[j] for j in range(n)) % prime for i in range(n)]
            if any(g.evaluate(x) != t for g, t in zip(gp, tp)):
                continue
            if Pp.evaluate(x) == 0:
                continue
            affine.add(tuple(x))
        roots_of_unity = math.gcd(d - 1, prime - 1)
        counts.append(len(affine) // roots_of_unity)
    mode = Counter(counts).most_common(1)[0][0]
    return mode, counts
