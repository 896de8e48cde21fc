import random
from fractions import Fraction

import pytest
import sympy
from sympy.polys.subresultants_qq_zz import sylvester
from hypothesis import given, settings, strategies as st

from legendrian.exactalg import (
    FFPoly, ModularReductionError, MultiPoly, PolySyntaxError, ResultantError, UnknownVariableError,
    discriminant, eliminate_resultant, format_poly, is_squarefree, parse_poly, reduce_mod_p, roots_mod_p,
    substitute_fraction, univariate_gcd,
)
from legendrian.exactalg import linalg

V3 = ("x1", "x2", "x3")


def P(text, variables=V3):
    return parse_poly(text, variables)


def to_sympy(p: MultiPoly):
    syms = sympy.symbols(p.variables) if p.variables else ()
    if len(p.variables) == 1:
        syms = (syms,) if not isinstance(syms, tuple) else syms
    total = sympy.Integer(0)
    for exp, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, e in zip(syms, exp):
            term *= s ** e
        total += term
    return sympy.expand(total)


coeffs = st.fractions(min_value=-20, max_value=20, max_denominator=6)
exponents = st.tuples(*[st.integers(0, 3)] * 3)
polys = st.dictionaries(exponents, coeffs, max_size=6).map(lambda t: MultiPoly(V3, t))


# parsing


def test_parse_examples():
    assert P("x1*x2*x3").terms == {(1, 1, 1): 1}
    assert len(parse_poly("x0^4 - x1^4", ("x0", "x1")).terms) == 2
    p = parse_poly("3/2*x0^2*x1 - x2", ("x0", "x1", "x2"))
    assert p.terms == {(2, 1, 0): Fraction(3, 2), (0, 0, 1): -1}


def test_parse_errors_carry_position():
    with pytest.raises(PolySyntaxError) as err:
        P("x1 + * x2")
    assert err.value.position == 5
    with pytest.raises(UnknownVariableError):
        P("x1 + y7")
    with pytest.raises(PolySyntaxError):
        P("")


@given(polys)
def test_format_parse_round_trip(p):
    assert parse_poly(format_poly(p), V3) == p
    assert format_poly(parse_poly(format_poly(p), V3)) == format_poly(p)


# arithmetic


def test_arith_examples():
    assert P("x1 + x2") * P("x1 - x2") == P("x1^2 - x2^2")
    assert P("x1*x2*x3") ** 2 == P("x1^2*x2^2*x3^2")
    p = P("x1 - 2/3*x3")
    assert p + MultiPoly.zero(V3) == p
    with pytest.raises(ValueError):
        p ** -1


def test_variables_auto_extend():
    a = parse_poly("x1", ("x1",))
    b = parse_poly("y", ("y",))
    s = a + b
    assert set(s.variables) == {"x1", "y"}
    assert s.evaluate({"x1": 2, "y": 5}) == 7


@given(polys, polys, polys)
@settings(max_examples=60, deadline=None)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == MultiPoly.zero(V3)


@given(polys, polys)
@settings(max_examples=40, deadline=None)
def test_product_matches_sympy(a, b):
    assert to_sympy(a * b) == sympy.expand(to_sympy(a) * to_sympy(b))


@given(polys)
def test_no_stored_zeros(p):
    assert all(c != 0 for c in (p - p).terms.values())
    assert all(c != 0 for c in p.terms.values())


# calculus and substitution


def test_derivative_examples():
    assert P("x1^3").diff("x1") == P("3*x1^2")
    assert P("x1*x2*x3").diff("x2") == P("x1*x3")
    q = parse_poly("x0^4 + x1^4", ("x0", "x1"))
    assert q.diff("x0", 2) == parse_poly("12*x0^2", ("x0", "x1"))
    assert MultiPoly.constant(5, V3).diff("x1").is_zero()


@given(polys, st.sampled_from(V3))
@settings(max_examples=40, deadline=None)
def test_derivative_matches_sympy(p, v):
    assert to_sympy(p.diff(v)) == sympy.diff(to_sympy(p), sympy.Symbol(v))


def test_substitute_examples():
    f = P("x1*x2*x3")
    grad = {v: f.diff(v) for v in V3}
    assert f.substitute(grad).extend(V3) == P("x1^2*x2^2*x3^2")
    point = {"x1": Fraction(1, 2), "x2": -3, "x3": 7}
    assert f.substitute(point).constant_value() == f.evaluate(point)
    assert P("x1*x2").substitute({"x1": 0}).is_zero()


def test_substitute_fraction_clears_denominators():
    p = P("x1^2 + x1*x2")
    # x1 -> x2/x3, times x3^2
    out = substitute_fraction(p, "x1", P("x2"), P("x3"), 2)
    assert out.extend(V3) == P("x2^2 + x2^2*x3")


@given(polys)
@settings(max_examples=30, deadline=None)
def test_euler_relation_on_homogeneous_parts(p):
    for d in range(0, 5):
        h = p.homogeneous_part(d)
        euler = sum((MultiPoly.var(v, V3) * h.diff(v) for v in V3), MultiPoly.zero(V3))
        assert euler == h * d


# resultants


def test_resultant_examples():
    vs = ("x", "b", "c")
    q = parse_poly("x^2 + b*x + c", vs)
    r = eliminate_resultant(q, q.diff("x"), "x")
    disc = parse_poly("b^2 - 4*c", vs)
    ratio = r.leading_term()[1] / disc.extend(r.variables).coefficient(r.leading_term()[0])
    assert r == disc.extend(r.variables) * ratio
    t = ("t",)
    assert eliminate_resultant(parse_poly("t - 1", t), parse_poly("t^2 - 1", t), "t").is_zero()
    with pytest.raises(ResultantError):
        eliminate_resultant(MultiPoly.zero(t), parse_poly("t", t), "t")


def test_conic_tangent_elimination_has_degree_two():
    # tangent lines to x^2 + y^2 = 1 through (3, 0): eliminate y between C and the polar condition
    vs = ("x", "y")
    C = parse_poly("x^2 + y^2 - 1", vs)
    polar = parse_poly("3*x - 1", vs)  # (3,0).grad C / 2 with the affine correction
    r = eliminate_resultant(C, polar, "x")
    assert r.degree("y") == 2


@given(st.lists(st.integers(-5, 5), min_size=2, max_size=4), st.lists(st.integers(-5, 5), min_size=2, max_size=4))
@settings(max_examples=40, deadline=None)
def test_resultant_matches_sympy(ca, cb):
    if ca[-1] == 0 or cb[-1] == 0:
        return
    t = sympy.Symbol("t")
    a = MultiPoly(("t",), {(i,): c for i, c in enumerate(ca)})
    b = MultiPoly(("t",), {(i,): c for i, c in enumerate(cb)})
    ours = eliminate_resultant(a, b, "t")
    value = ours.constant_value() if not ours.is_zero() else 0
    # sympy.resultant can differ by (-1)^(deg a * deg b); its Sylvester determinant is the oracle
    expected = sylvester(to_sympy(a), to_sympy(b), t, 1).det()
    assert value == expected


def test_bivariate_resultant_matches_sympy():
    vs = ("x", "y")
    a = parse_poly("x^2*y + 3*x - y^2 + 1", vs)
    b = parse_poly("x^3 - 2*x*y + y", vs)
    x, y = sympy.symbols("x y")
    assert to_sympy(eliminate_resultant(a, b, "x")) == sympy.expand(sylvester(to_sympy(a), to_sympy(b), x, 1).det())


def test_resultant_is_product_over_roots():
    # Res(a, b) = lc(a)^deg b * prod b(root of a), with a = 2(t-1)(t+3)
    t = ("t",)
    a = parse_poly("2*t^2 + 4*t - 6", t)
    b = parse_poly("t^3 - t + 5", t)
    expected = 2 ** 3 * b.evaluate([1]) * b.evaluate([-3])
    assert eliminate_resultant(a, b, "t").constant_value() == expected


def test_gcd_and_squarefree():
    t = ("t",)
    a = parse_poly("t^3 - 2*t^2 + t", t)  # t (t-1)^2
    assert not is_squarefree(a, "t")
    assert is_squarefree(parse_poly("t^3 - t", t), "t")
    g = univariate_gcd(a, parse_poly("t^2 - 1", t), "t")
    assert g == parse_poly("t - 1", t)
    assert discriminant(parse_poly("t^2 - 2*t + 1", t), "t").is_zero()


# finite fields


def test_mod_p_examples():
    x = ("x",)
    assert reduce_mod_p(parse_poly("1/2*x", x), 5).terms == {(1,): 3}
    assert reduce_mod_p(parse_poly("x^4 + x", x), 2).terms == {(4,): 1, (1,): 1}
    with pytest.raises(ModularReductionError):
        reduce_mod_p(parse_poly("1/3*x", x), 3)


def test_mod_p_is_a_ring_map():
    a, b = P("x1^2 - 1/2*x2*x3"), P("3*x3 + 1/5*x1")
    p = 10007
    assert reduce_mod_p(a * b, p) == reduce_mod_p(a, p) * reduce_mod_p(b, p)
    assert reduce_mod_p(a + b, p) == reduce_mod_p(a, p) + reduce_mod_p(b, p)
    point = (3, 5, 7)
    value = a.evaluate(point)
    assert reduce_mod_p(a, p).evaluate(point) == value.numerator * pow(value.denominator, -1, p) % p


def test_grid_evaluation_matches_pointwise():
    import numpy as np

    p = 1009
    f = reduce_mod_p(P("x1^3 - 2*x1*x2 + 7*x3^2 + 1"), p)
    rng = np.random.default_rng(0)
    arrays = [rng.integers(0, p, 50) for _ in V3]
    grid = f.evaluate_grid(arrays)
    for k in range(50):
        assert grid[k] == f.evaluate([int(a[k]) for a in arrays])


@given(st.lists(st.integers(0, 100), min_size=1, max_size=5, unique=True))
@settings(max_examples=40, deadline=None)
def test_roots_mod_p_recovers_planted_roots(roots):
    p = 101
    poly = [1]
    for r in roots:
        poly = [(a - r * b) % p for a, b in zip([0] + poly, poly + [0])]
    # times an irreducible quadratic: x^2 - 2 (2 is a non-residue mod 101)
    quad = [p - 2, 0, 1]
    full = [0] * (len(poly) + 2)
    for i, a in enumerate(poly):
        for j, b in enumerate(quad):
            full[i + j] = (full[i + j] + a * b) % p
    assert roots_mod_p(full, p, random.Random(1)) == sorted(r % p for r in roots)


def test_roots_match_brute_force():
    p = 97
    rng = random.Random(3)
    for _ in range(20):
        coeffs = [rng.randrange(p) for _ in range(6)] + [1]
        brute = [x for x in range(p) if sum(c * pow(x, i, p) for i, c in enumerate(coeffs)) % p == 0]
        assert roots_mod_p(coeffs, p, rng) == brute


def test_ffpoly_validation():
    with pytest.raises(ValueError):
        FFPoly(15, ("x",), {(1,): 1})


# linear algebra


@given(st.lists(st.lists(st.integers(-6, 6), min_size=4, max_size=4), min_size=4, max_size=4))
@settings(max_examples=40, deadline=None)
def test_det_and_rank_match_sympy(rows):
    M = sympy.Matrix(rows)
    assert linalg.det(rows) == M.det()
    assert linalg.rank(rows) == M.rank()
    for v in linalg.nullspace(rows, 4):
        assert all(x == 0 for x in linalg.matvec(rows, v))
    assert len(linalg.nullspace(rows, 4)) == 4 - M.rank()
