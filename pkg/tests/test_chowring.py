from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from legendrian.chowring import (
    AlgebraFormatError, GradedAlgebraSpec, exp_series, extract_component, format_algebra, gr_combine,
    pair_number, pairings, parse_algebra,
)

K3_TEXT = """
name K3blowup12
dim 2
L 2
Lp 2
E1 2
L^2 = 4
Lp^2 = 4
L*Lp = 12
E1^2 = -1
class h = L + Lp - E1
"""


def surface():
    return GradedAlgebraSpec((("h", 2),), 4, {(2,): 5})


def test_truncated_products():
    alg = surface()
    h = alg.sym("h")
    assert (h * h).poly.terms == {(2,): 1}
    assert (h * h * h).is_zero()
    big = GradedAlgebraSpec((("ch2", 4), ("ch3", 6)), 8)
    assert (big.sym("ch2") * big.sym("ch3")).is_zero()


def test_pairing_with_table():
    alg = GradedAlgebraSpec((("L", 2), ("Lp", 2)), 4, {(2, 0): 4, (0, 2): 4, (1, 1): 12})
    s = alg.sym("L") + alg.sym("Lp")
    assert pair_number(s * s) == 32


def test_unlisted_monomials_pair_to_zero():
    alg = GradedAlgebraSpec((("a", 2), ("b", 2)), 4, {(2, 0): 3})
    assert pair_number(alg.sym("b") ** 2) == 0
    assert pair_number(alg.sym("a") ** 2 + alg.sym("a") * alg.sym("b")) == 3


def test_exponential_series():
    alg = GradedAlgebraSpec((("h", 2),), 2)
    h = alg.sym("h")
    assert exp_series(-1, h) == alg.one() - h
    big = GradedAlgebraSpec((("h", 2),), 8)
    H = big.sym("h")
    assert exp_series(1, H) * exp_series(-1, H) == big.one()
    assert extract_component(exp_series(1, H) + exp_series(-1, H), 8) == (H ** 4).scale(Fraction(1, 12))


def test_generating_identity_degree_zero_and_two():
    n = 3
    alg = GradedAlgebraSpec((("h", 2), ("ch1", 2)), 2 * n)
    h, ch1 = alg.sym("h"), alg.sym("ch1")
    ch_t = alg.scalar(n) + ch1
    ch_omega = alg.scalar(n) - ch1  # dual: odd parts flip sign
    total = exp_series(-1, h) * ch_t + exp_series(1, h) * ch_omega + exp_series(1, h) + exp_series(-1, h)
    assert extract_component(total, 0) == alg.scalar(2 * n + 2)
    assert extract_component(alg.scalar(7), 2).is_zero()


@given(st.lists(st.integers(-5, 5), min_size=3, max_size=3), st.lists(st.integers(-5, 5), min_size=3, max_size=3))
@settings(max_examples=40, deadline=None)
def test_graded_ring_laws(a, b):
    alg = GradedAlgebraSpec((("x", 2), ("y", 4), ("z", 2)), 8)
    x, y, z = alg.sym("x"), alg.sym("y"), alg.sym("z")
    p = alg.scalar(a[0]) + x.scale(a[1]) + y.scale(a[2])
    q = alg.scalar(b[0]) + x.scale(b[1]) + (x * y).scale(b[2])
    assert p * q == q * p
    assert gr_combine(p, q, "add") == p + q
    assert gr_combine(p, q, "mul") == p * q
    assert gr_combine(p, None, "scale", Fraction(1, 3)) == p.scale(Fraction(1, 3))
    assert exp_series(1, x) * exp_series(1, z) == exp_series(1, x + z)


def test_mixed_algebras_rejected():
    with pytest.raises(ValueError):
        surface().sym("h") + GradedAlgebraSpec((("h", 2),), 4).sym("h")


def test_parse_algebra_file():
    alg = parse_algebra(K3_TEXT)
    assert alg.name == "K3blowup12" and alg.dim == 2 and alg.top_degree == 4
    h = alg.classes["h"]
    assert pair_number(h * h) == 4 + 2 * 12 + 4 - 1
    again = parse_algebra(format_algebra(alg))
    assert again.intersection_table == alg.intersection_table
    assert pair_number(again.classes["h"] ** 2) == pair_number(h * h)


def test_pairings_against_complementary_monomials():
    alg = parse_algebra(K3_TEXT)
    table = pairings(alg.classes["h"])
    # h is a divisor class: one number per degree-2 symbol
    assert sorted(table.values()) == [1, 16, 16]


@pytest.mark.parametrize("text, line", [
    ("top 4\nh 3\n", 0),
    ("top 4\nh 2\nh^3 = 1\n", 3),
    ("top 4\nh 2\nclass h = h\n", 3),
    ("top 4\nh 2\nwhat is this\n", 3),
    ("h 2\n", 0),
])
def test_parse_algebra_errors(text, line):
    with pytest.raises(AlgebraFormatError) as err:
        parse_algebra(text)
    assert err.value.line == line
