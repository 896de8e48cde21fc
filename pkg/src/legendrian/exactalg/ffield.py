"""Reduction of rational polynomials modulo a prime, and univariate root finding over F_p."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .poly import Exponent, MultiPoly

DEFAULT_PRIME = 2147483647  # 2^31 - 1


class ModularReductionError(ArithmeticError):
    pass


def _is_probable_prime(p: int) -> bool:
    if p < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


class FFPoly:
    """Polynomial with coefficients in F_p, same exponent layout as MultiPoly."""

    __slots__ = ("prime", "variables", "terms")

    def __init__(self, prime: int, variables: Sequence[str], terms: Mapping[Exponent, int]):
        if not _is_probable_prime(prime):
            raise ValueError(f"{prime} is not prime")
        self.prime = prime
        self.variables = tuple(variables)
        self.terms = {tuple(e): c % prime for e, c in terms.items() if c % prime}

    def _check(self, other: FFPoly):
        if self.prime != other.prime or self.variables != other.variables:
            raise ValueError("FFPoly operands over different primes or variables")

    def __add__(self, other: FFPoly) -> FFPoly:
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return FFPoly(self.prime, self.variables, terms)

    def __mul__(self, other: FFPoly) -> FFPoly:
        self._check(other)
        terms: dict[Exponent, int] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                terms[e] = (terms.get(e, 0) + ca * cb) % self.prime
        return FFPoly(self.prime, self.variables, terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FFPoly):
            return NotImplemented
        return (self.prime, self.variables, self.terms) == (other.prime, other.variables, other.terms)

    def __repr__(self) -> str:
        return f"FFPoly({self.prime}, {self.variables!r}, {self.terms!r})"

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, point: Sequence[int]) -> int:
        p = self.prime
        total = 0
        for exp, c in self.terms.items():
            t = c
            for x, e in zip(point, exp):
                if e:
                    t = t * pow(x, e, p) % p
            total += t
        return total % p

    def univariate_in(self, var: str, values: Mapping[str, int]) -> list[int]:
        """Coefficient list (low to high) in ``var`` after binding every other variable."""
        p = self.prime
        i = self.variables.index(var)
        others = [(j, values[v]) for j, v in enumerate(self.variables) if j != i and v in values]
        free = [v for j, v in enumerate(self.variables) if j != i and v not in values]
        out: dict[int, int] = {}
        for exp, c in self.terms.items():
            if any(exp[self.variables.index(v)] for v in free):
                raise ValueError(f"variables {free} are unbound")
            t = c
            for j, x in others:
                if exp[j]:
                    t = t * pow(x, exp[j], p) % p
            out[exp[i]] = (out.get(exp[i], 0) + t) % p
        deg = max(out, default=-1)
        return _trim([out.get(k, 0) for k in range(deg + 1)])

    def evaluate_grid(self, arrays: Sequence[np.ndarray]) -> np.ndarray:
        """Vectorized evaluation at many points (small primes only, int64 safe)."""
        p = self.prime
        if p > 3037000499 // 2:
            raise ValueError("grid evaluation needs p < 2^30")
        arrays = [np.asarray(a, dtype=np.int64) % p for a in arrays]
        total = np.zeros(np.broadcast(*arrays).shape, dtype=np.int64)
        for exp, c in self.terms.items():
            t = np.full(total.shape, c, dtype=np.int64)
            for a, e in zip(arrays, exp):
                for _ in range(e):
                    t = t * a % p
            total = (total + t) % p
        return total


def reduce_mod_p(poly: MultiPoly, prime: int = DEFAULT_PRIME) -> FFPoly:
    terms = {}
    for exp, c in poly.terms.items():
        if c.denominator % prime == 0:
            from .parsing import format_monomial

            mono = format_monomial(poly.variables, exp)
            raise ModularReductionError(f"denominator of the coefficient {c} of {mono} is divisible by {prime}")
        terms[exp] = c.numerator * pow(c.denominator, -1, prime)
    return FFPoly(prime, poly.variables, terms)


def reduce_scalar(c: Fraction | int, prime: int) -> int:
    c = Fraction(c)
    if c.denominator % prime == 0:
        raise ModularReductionError(f"denominator of {c} is divisible by {prime}")
    return c.numerator * pow(c.denominator, -1, prime) % prime


# univariate arithmetic on coefficient lists (low to high)


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def upoly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def upoly_divmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    r = list(a)
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(r) >= len(b) and r:
        f = r[-1] * inv % p
        shift = len(r) - len(b)
        q[shift] = f
        for i, c in enumerate(b):
            r[shift + i] = (r[shift + i] - f * c) % p
        _trim(r)
    return _trim(q), r


def upoly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, upoly_divmod(a, b, p)[1]
    if not a:
        return []
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def upoly_powmod(base: list[int], e: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    base = upoly_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = upoly_divmod(upoly_mul(result, base, p), mod, p)[1]
        e >>= 1
        if e:
            base = upoly_divmod(upoly_mul(base, base, p), mod, p)[1]
    return result


def upoly_eval(a: list[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


def roots_mod_p(a: Sequence[int], p: int, rng: random.Random | None = None) -> list[int]:
    """Distinct roots in F_p of a nonzero univariate polynomial (p odd)."""
    a = _trim([c % p for c in a])
    if not a:
        raise ValueError("every element is a root of the zero polynomial")
    if len(a) == 1:
        return []
    rng = rng or random.Random(0)
    # split off the product of distinct linear factors: gcd(a, x^p - x)
    xp = upoly_powmod([0, 1], p, a, p) + [0, 0]
    xp[1] = (xp[1] - 1) % p
    g = upoly_gcd(a, _trim(xp), p)
    roots: list[int] = []
    _split_linear(g, p, rng, roots)
    return sorted(roots)


def _split_linear(g: list[int], p: int, rng: random.Random, out: list[int]) -> None:
    # g is monic, squarefree, all roots in F_p (Cantor-Zassenhaus, equal degree 1)
    deg = len(g) - 1
    if deg <= 0:
        return
    if deg == 1:
        out.append((-g[0]) * pow(g[1], -1, p) % p)
        return
    while True:
        shift = rng.randrange(p)
        h = upoly_powmod([shift, 1], (p - 1) // 2, g, p)
        h = list(h) + [0] * max(0, 1 - len(h))
        h[0] = (h[0] - 1) % p
        d = upoly_gcd(g, _trim(h), p)
        if 0 < len(d) - 1 < deg:
            _split_linear(d, p, rng, out)
            _split_linear(upoly_divmod(g, d, p)[0], p, rng, out)
            return
