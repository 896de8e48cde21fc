"""Sylvester resultants with fraction-free (Bareiss) determinant expansion."""

from __future__ import annotations

from fractions import Fraction

from .poly import MultiPoly


class ResultantError(ValueError):
    pass


def sylvester_matrix(a: MultiPoly, b: MultiPoly, var: str) -> list[list[MultiPoly]]:
    a, b = MultiPoly._align(a, b)
    if var not in a.variables:
        a = a.extend(a.variables + (var,))
        b = b.extend(a.variables)
    m, k = a.degree(var), b.degree(var)
    ca, cb = a.coefficients_in(var), b.coefficients_in(var)
    zero = MultiPoly.zero(a.variables)
    size = m + k
    rows = []
    for i in range(k):
        row = [zero] * size
        for j in range(m + 1):
            row[i + j] = ca.get(m - j, zero)
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for j in range(k + 1):
            row[i + j] = cb.get(k - j, zero)
        rows.append(row)
    return rows


def bareiss_det(matrix: list[list[MultiPoly]]) -> MultiPoly:
    """Determinant of a square matrix of polynomials.

    Rows are made primitive first (their rational contents are pulled out as a
    scalar) and the elimination itself is Bareiss' one-step fraction-free scheme,
    so every intermediate division is exact.
    """
    n = len(matrix)
    if n == 0:
        return MultiPoly.constant(1)
    variables = matrix[0][0].variables
    scale = Fraction(1)
    m = []
    for row in matrix:
        contents = [e.content() for e in row if not e.is_zero()]
        if not contents:
            return MultiPoly.zero(variables)
        c = _rational_gcd(contents)
        scale *= c
        m.append([e * (1 / c) for e in row])
    sign = 1
    prev = MultiPoly.constant(1, variables)
    for k in range(n - 1):
        if m[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not m[i][k].is_zero()), None)
            if swap is None:
                return MultiPoly.zero(variables)
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = pivot * m[i][j] - m[i][k] * m[k][j]
                m[i][j] = num.exact_div(prev) if not num.is_zero() else num
            m[i][k] = MultiPoly.zero(variables)
        prev = pivot
    return m[n - 1][n - 1] * (scale * sign)


def _rational_gcd(values: list[Fraction]) -> Fraction:
    from math import gcd

    num = 0
    den = 1
    for v in values:
        num = gcd(num, v.numerator)
        den = den * v.denominator // gcd(den, v.denominator)
    return Fraction(num, den)


def eliminate_resultant(a: MultiPoly, b: MultiPoly, var: str) -> MultiPoly:
    """Sylvester resultant of ``a`` and ``b`` with respect to ``var``.

    Conventions follow the usual determinant of the Sylvester matrix with the
    shifted coefficient rows of ``a`` first.  If exactly one input is free of
    ``var`` the resultant is that input raised to the other's degree.
    """
    if a.is_zero() or b.is_zero():
        raise ResultantError("resultant of a zero polynomial")
    m, k = a.degree(var), b.degree(var)
    if m <= 0 and k <= 0:
        raise ResultantError(f"neither polynomial involves {var}")
    a, b = MultiPoly._align(a, b)
    if m == 0:
        return a ** k
    if k == 0:
        return b ** m
    det = bareiss_det(sylvester_matrix(a, b, var))
    if var in det.variables:
        det = det.extend(tuple(v for v in det.variables if v != var))
    return det


def discriminant(p: MultiPoly, var: str) -> MultiPoly:
    """Res(p, dp/dvar) (no leading-coefficient normalization)."""
    return eliminate_resultant(p, p.diff(var), var)


# univariate helpers over Q


def _univariate_coeffs(p: MultiPoly, var: str) -> list[Fraction]:
    others = [v for v in p.used_variables() if v != var]
    if others:
        raise ValueError(f"polynomial is not univariate in {var}: also uses {others}")
    deg = p.degree(var)
    coeffs = [Fraction(0)] * (deg + 1)
    if deg < 0:
        return []
    i = p.variables.index(var) if var in p.variables else None
    for exp, c in p.terms.items():
        coeffs[exp[i] if i is not None else 0] = c
    return coeffs


def _trim(c: list[Fraction]) -> list[Fraction]:
    while c and not c[-1]:
        c.pop()
    return c


def univariate_gcd(a: MultiPoly, b: MultiPoly, var: str) -> MultiPoly:
    """Monic gcd of two univariate polynomials over Q."""
    x = _trim(_univariate_coeffs(a, var))
    y = _trim(_univariate_coeffs(b, var))
    while y:
        r = list(x)
        inv = 1 / y[-1]
        while len(r) >= len(y):
            f = r[-1] * inv
            shift = len(r) - len(y)
            for i, c in enumerate(y):
                r[shift + i] -= f * c
            r.pop()
            _trim(r)
        x, y = y, r
    if not x:
        return MultiPoly.zero((var,))
    lead = x[-1]
    return MultiPoly((var,), {(i,): c / lead for i, c in enumerate(x) if c})


def is_squarefree(p: MultiPoly, var: str) -> bool:
    if p.degree(var) <= 0:
        return True
    return univariate_gcd(p, p.diff(var), var).degree(var) == 0
