"""Root systems in their standard Euclidean models, parabolic data, and index computations.

Node numbering is Bourbaki's.  Roots are generated from the simple roots by
closing under simple reflections; positive roots are those whose coordinates
in the simple-root basis are all nonnegative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .exactalg import linalg

Vector = tuple[Fraction, ...]

KNOWN_POSITIVE_COUNTS = {"G2": 6, "F4": 24, "E6": 36, "E7": 63, "E8": 120}


def _e(i: int, dim: int, c=1) -> list[Fraction]:
    v = [Fraction(0)] * dim
    v[i] = Fraction(c)
    return v


def _add(*vs) -> Vector:
    return tuple(sum(xs, Fraction(0)) for xs in zip(*vs))


def _scale(c, v) -> Vector:
    return tuple(Fraction(c) * x for x in v)


def _dot(u, v) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def simple_roots(kind: str, rank: int) -> list[Vector]:
    half = Fraction(1, 2)
    if kind == "A":
        d = rank + 1
        return [_add(_e(i, d), _e(i + 1, d, -1)) for i in range(rank)]
    if kind in ("B", "C", "D"):
        d = rank
        chain = [_add(_e(i, d), _e(i + 1, d, -1)) for i in range(rank - 1)]
        if kind == "B":
            return chain + [tuple(_e(rank - 1, d))]
        if kind == "C":
            return chain + [tuple(_e(rank - 1, d, 2))]
        if rank < 3:
            raise ValueError("D needs rank >= 3")
        return chain + [_add(_e(rank - 2, d), _e(rank - 1, d))]
    if kind == "G" and rank == 2:
        # sum-zero plane in R^3; alpha_1 short, alpha_2 long
        return [(Fraction(1), Fraction(-1), Fraction(0)), (Fraction(-2), Fraction(1), Fraction(1))]
    if kind == "F" and rank == 4:
        return [
            _add(_e(1, 4), _e(2, 4, -1)),
            _add(_e(2, 4), _e(3, 4, -1)),
            tuple(_e(3, 4)),
            (half, -half, -half, -half),
        ]
    if kind == "E" and rank in (6, 7, 8):
        e8 = [
            (half, -half, -half, -half, -half, -half, -half, half),
            _add(_e(0, 8), _e(1, 8)),
        ] + [_add(_e(i, 8), _e(i - 1, 8, -1)) for i in range(1, 7)]
        return e8[:rank]
    raise ValueError(f"unsupported root system {kind}{rank}")


def _parse_label(label: str) -> tuple[str, int]:
    label = label.strip().upper()
    return label[0], int(label[1:])


@dataclass
class RootSystem:
    kind: str
    rank: int
    simple: list[Vector] = field(repr=False, default_factory=list)

    def __post_init__(self):
        if not self.simple:
            self.simple = simple_roots(self.kind, self.rank)

    @classmethod
    def of(cls, label: str) -> RootSystem:
        kind, rank = _parse_label(label)
        return cls(kind, rank)

    @property
    def label(self) -> str:
        return f"{self.kind}{self.rank}"

    def inner(self, u, v) -> Fraction:
        return _dot(u, v)

    def half_length(self, i: int) -> Fraction:
        """d_i = (alpha_i, alpha_i) / 2."""
        a = self.simple[i - 1]
        return _dot(a, a) / 2

    def coroot_pairing(self, alpha, i: int) -> Fraction:
        """alpha(H_i) = 2 (alpha, alpha_i) / (alpha_i, alpha_i)."""
        a = self.simple[i - 1]
        return 2 * _dot(alpha, a) / _dot(a, a)

    @cached_property
    def cartan(self) -> list[list[int]]:
        """A[i][j] = <alpha_i, alpha_j^vee>."""
        out = []
        for a in self.simple:
            row = []
            for j in range(1, self.rank + 1):
                v = self.coroot_pairing(a, j)
                assert v.denominator == 1
                row.append(int(v))
            out.append(row)
        return out

    def reflect(self, v, i: int) -> Vector:
        return _add(v, _scale(-self.coroot_pairing(v, i), self.simple[i - 1]))

    @cached_property
    def roots(self) -> frozenset[Vector]:
        seen = set(self.simple)
        frontier = list(self.simple)
        while frontier:
            nxt = []
            for v in frontier:
                for i in range(1, self.rank + 1):
                    w = self.reflect(v, i)
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        return frozenset(seen)

    @cached_property
    def _gram_inverse(self):
        gram = [[_dot(a, b) for b in self.simple] for a in self.simple]
        return linalg.inverse(gram)

    def simple_coordinates(self, v) -> tuple[Fraction, ...]:
        """Coefficients of v in the simple-root basis (v must lie in their span)."""
        rhs = [_dot(v, a) for a in self.simple]
        coeffs = tuple(linalg.matvec(self._gram_inverse, rhs))
        assert _add(*[_scale(c, a) for c, a in zip(coeffs, self.simple)]) == tuple(v), "vector outside root span"
        return coeffs

    @cached_property
    def _root_coordinates(self) -> dict[Vector, tuple[Fraction, ...]]:
        return {r: self.simple_coordinates(r) for r in self.roots}

    @cached_property
    def positive_roots(self) -> list[Vector]:
        coords = self._root_coordinates
        pos = [r for r in self.roots if all(c >= 0 for c in coords[r])]
        return sorted(pos, key=lambda r: (sum(coords[r]), coords[r]))

    @cached_property
    def fundamental_weights(self) -> list[Vector]:
        """omega_i with <omega_i, alpha_j^vee> = delta_ij, inside the root span."""
        # omega_i = sum_k M[i][k] alpha_k with (omega_i, alpha_j) = delta_ij d_j
        gram = [[_dot(a, b) for b in self.simple] for a in self.simple]
        inv = linalg.inverse(gram)
        weights = []
        for i in range(self.rank):
            rhs = [Fraction(0)] * self.rank
            rhs[i] = _dot(self.simple[i], self.simple[i]) / 2
            coeffs = linalg.matvec(inv, rhs)
            weights.append(_add(*[_scale(c, a) for c, a in zip(coeffs, self.simple)]))
        return weights

    def omega(self, i: int) -> Vector:
        return self.fundamental_weights[i - 1]

    def weight_coordinates(self, v) -> tuple[Fraction, ...]:
        """Coefficients of v in the fundamental-weight basis."""
        return tuple(self.coroot_pairing(v, j) for j in range(1, self.rank + 1))

    @cached_property
    def highest_root(self) -> Vector:
        return self.positive_roots[-1]


@dataclass(frozen=True)
class ParabolicChoice:
    system: RootSystem
    I: frozenset[int]

    def __post_init__(self):
        if not self.I:
            raise ValueError("I must be nonempty")
        bad = [i for i in self.I if not 1 <= i <= self.system.rank]
        if bad:
            raise ValueError(f"nodes {bad} are outside 1..{self.system.rank}")

    @classmethod
    def of(cls, label: str, nodes) -> ParabolicChoice:
        if isinstance(nodes, int):
            nodes = [nodes]
        return cls(RootSystem.of(label), frozenset(nodes))


def phi_P_plus(pc: ParabolicChoice, i: int | None = None) -> list[Vector]:
    rs = pc.system
    if i is None:
        return [a for a in rs.positive_roots if any(_dot(a, rs.omega(j)) > 0 for j in pc.I)]
    if i not in pc.I:
        raise ValueError(f"node {i} is not in I = {sorted(pc.I)}")
    wi = rs.omega(i)
    out = []
    for a in rs.positive_roots:
        if any(_dot(a, rs.omega(j)) != 0 for j in pc.I if j != i):
            continue
        if _dot(a, wi) > 0 and _dot(rs.reflect(a, i), wi) == 0:
            out.append(a)
    return out


def chern_root_sum(pc: ParabolicChoice) -> Vector:
    roots = phi_P_plus(pc)
    return _add(*roots) if roots else tuple(Fraction(0) for _ in pc.system.simple[0])


def index_and_dim(pc: ParabolicChoice) -> tuple[Fraction, int]:
    if len(pc.I) != 1:
        raise ValueError("index is defined here for a single marked node")
    (i,) = pc.I
    rs = pc.system
    coords = rs.weight_coordinates(chern_root_sum(pc))
    stray = [j + 1 for j, c in enumerate(coords) if c and j + 1 != i]
    if stray:
        raise ArithmeticError(f"sum of roots has weight support {stray} outside I")
    return coords[i - 1], len(phi_P_plus(pc))


def adjoint_choice(rs: RootSystem) -> ParabolicChoice:
    """Marked nodes = support of the highest root in the fundamental-weight basis."""
    coords = rs.weight_coordinates(rs.highest_root)
    return ParabolicChoice(rs, frozenset(j + 1 for j, c in enumerate(coords) if c))


def adjoint_index(rs: RootSystem) -> tuple[Fraction, int]:
    """(gamma, n) with c_1 = gamma * theta on the adjoint variety."""
    pc = adjoint_choice(rs)
    total = chern_root_sum(pc)
    theta = rs.highest_root
    ratios = {c1 / t for c1, t in zip(rs.weight_coordinates(total), rs.weight_coordinates(theta)) if t}
    zeros_ok = all(c == 0 for c, t in zip(rs.weight_coordinates(total), rs.weight_coordinates(theta)) if not t)
    if len(ratios) != 1 or not zeros_ok:
        raise ArithmeticError("first Chern class is not a multiple of the highest root")
    return ratios.pop(), len(phi_P_plus(pc))


@dataclass
class T11Result:
    lhs: Fraction
    rhs: Fraction
    gamma: Fraction
    n: int
    positivity: Fraction  # (2 omega_i - alpha_i, omega_i)

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def t11_identity_check(pc: ParabolicChoice, lam: int) -> T11Result:
    if len(pc.I) != 1:
        raise ValueError("need a single marked node")
    if lam < 1:
        raise ValueError("lambda must be positive")
    (i,) = pc.I
    rs = pc.system
    gamma, n = index_and_dim(pc)
    d = rs.half_length(i)
    lhs = sum((rs.coroot_pairing(a, i) ** 2 * d for a in phi_P_plus(pc, i)), Fraction(0))
    wi = rs.omega(i)
    positivity = 2 * _dot(wi, wi) - _dot(rs.simple[i - 1], wi)
    rhs = lam * (2 * gamma - (n + 1) * lam) * positivity
    return T11Result(lhs, rhs, gamma, n, positivity)


# marked nodes giving the subadjoint varieties, fixed by the lambda = 1 identity
SUBADJOINT = (("C3", 3, "LG(3,6)"), ("A5", 3, "G(3,6)"), ("D6", 6, "S6"), ("E7", 7, "E7/P7"))

# varieties of Picard number one with index above (n+1)/2
HIGH_INDEX = (
    ("A3", 1, "P3"), ("A4", 1, "P4"), ("A5", 1, "P5"),
    ("A4", 2, "G(2,5)"), ("A5", 2, "G(2,6)"), ("A6", 3, "G(3,7)"),
    ("C3", 2, "Gw(2,6)"), ("C4", 2, "Gw(2,8)"),
    ("B3", 1, "Q5"), ("D4", 1, "Q6"), ("D5", 1, "Q8"),
    ("D5", 5, "S5"), ("D6", 6, "S6"), ("D7", 7, "S7"),
    ("E6", 1, "Cayley plane"),
    ("C3", 3, "LG(3,6)"), ("A5", 3, "G(3,6)"), ("E7", 7, "E7/P7"),
)


def snow_table(entries=HIGH_INDEX) -> list[tuple[str, int, str, Fraction, int, bool]]:
    rows = []
    for label, node, name in entries:
        gamma, n = index_and_dim(ParabolicChoice.of(label, node))
        rows.append((label, node, name, gamma, n, gamma > Fraction(n + 1, 2)))
    return rows
