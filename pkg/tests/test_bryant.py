import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given, settings, strategies as st

from legendrian import bryant, contact
from legendrian.bryant import FlagPoint, HypersurfaceData, phi_forward, phi_inverse, proportional
from legendrian.exactalg import MultiPoly, parse_poly

X3 = bryant.xs(3)
X2 = bryant.xs(2)
fracs = st.fractions(min_value=-12, max_value=12, max_denominator=5)


def surface(text, p0=(0, 0, 0, 1), H0=(1, 0, 0, 0), **kw):
    n = len(p0) - 1
    return HypersurfaceData(parse_poly(text, bryant.xs(n)), p0, H0, **kw)


@st.composite
def flags(draw, n):
    x = [draw(fracs) for _ in range(n + 1)]
    y = [draw(fracs) for _ in range(n + 1)]
    k = draw(st.integers(0, n))
    assume(x[k] != 0)
    y[k] = 0
    y[k] = -sum(a * b for a, b in zip(x, y)) / x[k]
    assume(any(y))
    return FlagPoint(tuple(x), tuple(y))


# the map and its inverse


def test_forward_on_affine_flag():
    a, b = Fraction(2), Fraction(-3)
    y1, y2 = Fraction(5), Fraction(7)
    y0 = -a * y1 - b * y2
    p = FlagPoint((1, a, b), (y0, y1, y2))
    assert phi_forward(p) == (y1, y0 - b * y2, a * y2, y2)


def test_x0_zero_stratum_collapses():
    p = FlagPoint((0, 2, 3, 5), (1, 1, 1, -1))
    image = phi_forward(p)
    # [0, .., 0, -x_n, x_1, .., x_{n-1}, 0] up to the factor y_n
    assert proportional(image, (0, 0, -5, 2, 3, 0))


def test_indeterminacy():
    p = FlagPoint((0, 1, 0), (1, 0, 0))
    assert phi_forward(p) is None
    assert bryant.exceptional_stratum(p) == "Ind"


def test_inverse_convention():
    p = phi_inverse((1, 0, 1, 1))
    assert p.x == (1, 1, Fraction(-1, 2))
    assert p.y == (Fraction(-1, 2), 1, 1)


def test_inverse_needs_zn():
    with pytest.raises(bryant.IndeterminateError):
        phi_inverse((1, 2, 3, 0))


def test_flag_validation():
    with pytest.raises(bryant.IncidenceError):
        FlagPoint((1, 1, 1), (1, 1, 1))
    with pytest.raises(ValueError):
        FlagPoint((0, 0, 0), (1, 1, 1))
    with pytest.raises(ValueError):
        FlagPoint((1, 0), (0, 1))


@given(st.integers(2, 3).flatmap(lambda n: st.lists(fracs, min_size=2 * n, max_size=2 * n)))
@settings(max_examples=60, deadline=None)
def test_forward_after_inverse(wz):
    assume(wz[-1] != 0)
    assert proportional(phi_forward(phi_inverse(wz)), wz)


@given(st.integers(2, 3).flatmap(flags))
@settings(max_examples=60, deadline=None)
def test_inverse_after_forward_off_exceptional_locus(p):
    assume(bryant.exceptional_stratum(p) == "regular")
    q = phi_inverse(phi_forward(p))
    assert proportional(q.x, p.x) and proportional(q.y, p.y)


def test_inverse_matches_symbolic_composition():
    n = 3
    w = sympy.symbols("w1:4")
    z = sympy.symbols("z1:4")
    s = sum(w[i] * z[i] for i in range(n - 1))
    x = [z[2], z[0], z[1], -(w[2] + s / z[2]) / 2]
    y = [(w[2] - s / z[2]) / 2, w[0], w[1], z[2]]
    assert sympy.simplify(sum(a * b for a, b in zip(x, y))) == 0
    fw = [x[0] * y[1], x[0] * y[2], x[0] * y[0] - x[3] * y[3], x[1] * y[3], x[2] * y[3], x[0] * y[3]]
    for got, want in zip(fw, list(w) + list(z)):
        assert sympy.simplify(got - z[2] * want) == 0


# contact pullback


@pytest.mark.parametrize("n", [2, 3, 4])
def test_pullback_identity(n):
    assert bryant.contact_pullback_check(n).zero


def test_pullback_perturbation_is_detected():
    assert not bryant.contact_pullback_check(3, factor=2).zero
    assert not bryant.contact_pullback_check(3, factor=1, normalization="literal").zero
    assert bryant.contact_pullback_check(3, factor=2, normalization="literal").zero


def test_pullback_input_checks():
    with pytest.raises(ValueError):
        bryant.contact_pullback_check(1)
    with pytest.raises(ValueError):
        bryant.contact_pullback_check(2, normalization="other")


# exceptional behaviour


@given(st.integers(2, 3).flatmap(flags), st.integers(2, 3).flatmap(flags))
@settings(max_examples=60, deadline=None)
def test_fiber_criterion_on_random_pairs(a, b):
    assume(a.n == b.n and "Ind" not in (bryant.exceptional_stratum(a), bryant.exceptional_stratum(b)))
    assert bryant.same_fiber(a, b) == bryant.same_fiber_predicted(a, b)


def test_fiber_criterion_on_exceptional_pairs():
    # same point on H0, different hyperplanes through it
    a = FlagPoint((0, 1, 2, 3), (5, 1, 1, -1))
    b = FlagPoint((0, 1, 2, 3), (2, 1, 1, -1))
    assert bryant.same_fiber_predicted(a, b) and bryant.same_fiber(a, b)
    # same hyperplane through e_n, different points on it
    c = FlagPoint((1, 1, 0, 4), (-1, 1, 7, 0))
    d = FlagPoint((2, 2, 0, 9), (-1, 1, 7, 0))
    assert bryant.same_fiber_predicted(c, d) and bryant.same_fiber(c, d)
    e = FlagPoint((1, 1, 0, 4), (-1, 1, 7, 0))
    f = FlagPoint((1, 1, 0, 5), (-2, 2, 7, 0))
    assert not bryant.same_fiber_predicted(e, f) and not bryant.same_fiber(e, f)


def test_strata():
    assert bryant.exceptional_stratum(FlagPoint((1, 1, 1), (1, 1, -2))) == "regular"
    assert bryant.exceptional_stratum(FlagPoint((0, 1, 1), (1, 1, -1))) == "E1"
    assert bryant.exceptional_stratum(FlagPoint((1, 1, 1), (1, -1, 0))) == "E2"


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_indeterminacy_locus_singular_only_at_origin(n):
    gens = bryant.indeterminacy_singular_locus(n)
    # every coordinate appears (up to sign) as a generator, so the singular locus is the origin
    single = {g.used_variables()[0] for g in gens
              if g.total_degree() == 1 and len(g.terms) == 1}
    assert single == set(gens[0].variables)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_blowup_chart_is_a_morphism(n):
    comps = bryant.blowup_chart(n)
    assert any(c.is_constant() and not c.is_zero() for c in comps)


# conormal lift and transform


def test_quadric_lift_satisfies_incidence():
    Z = surface("x0*x3 - x1*x2")
    cc = bryant.conormal_chart(Z)
    assert cc.incidence().is_zero()
    pt = (Fraction(2), Fraction(-1))
    flag = cc.flag_at(pt)
    assert Z.value(flag.x) == 0


def test_graph_lift_is_tilted_gradient():
    # x3 x0^2 = f(x1, x2) is the graph of f on the patch x0 = 1
    F = parse_poly("x3*x0^2 - x1^3 - x1*x2^2", X3)
    cc = bryant.conormal_chart(HypersurfaceData(F, (0, 0, 0, 1), (1, 0, 0, 0)), solved=3)
    t = cc.params
    f = parse_poly("t1^3 + t1*t2^2", t)
    t1, t2 = MultiPoly.gens(t)
    one = MultiPoly.constant(1, t)
    assert cc.x == [one, t1, t2, f]
    euler = t1 * f.diff("t1") + t2 * f.diff("t2")
    # y = [x.grad f - f, -grad f, 1]
    assert cc.y == [euler - f, -f.diff("t1"), -f.diff("t2"), one]
    assert cc.incidence().is_zero()


def test_singular_point_flagged_by_rank_drop():
    Z = surface("x0*x3 - x1^2", p0=(0, 1, 0, 0))
    cc = bryant.conormal_chart(Z, solved=3, patch=2)
    assert cc.incidence().is_zero()
    vertex = [Fraction(0), Fraction(0)]
    assert cc.is_singular_at(vertex)
    assert not cc.is_singular_at([Fraction(1), Fraction(1)])
    chart = cc.as_chart()
    from legendrian.exactalg import linalg

    assert linalg.rank(chart.jet_matrix_at(vertex)) < 3
    assert linalg.rank(chart.jet_matrix_at([Fraction(1), Fraction(2)])) == 3


def test_nodal_cubic_curve_transform():
    Z = HypersurfaceData(parse_poly("x0*x1*x2 - x0^3 - x1^3", X2), (0, 0, 1), (1, 0, 0))
    chart = bryant.bryant_transform(Z, solved=2)
    assert chart.N == 3
    assert contact.is_legendrian(chart, bryant.bryant_form(2))
    assert chart.is_immersive()


@given(st.integers(0, 10**9), st.integers(2, 3), st.integers(2, 4))
@settings(max_examples=15, deadline=None)
def test_transform_is_always_legendrian(seed, n, degree):
    Z = bryant.random_linear_hypersurface(random.Random(seed), n, degree)
    chart = bryant.bryant_transform(Z)
    assert contact.is_legendrian(chart, bryant.bryant_form(n))


def test_transform_rejects_exceptional_patch():
    Z = surface("x0")
    with pytest.raises(ValueError):
        bryant.bryant_transform(Z, solved=0, patch=1)


def test_no_rational_chart():
    with pytest.raises(ValueError):
        bryant.conormal_chart(surface("x0^2 + x1^2 + x2^2 + x3^2"))


def test_transversality():
    flex = HypersurfaceData(parse_poly("x0^2*x1 + x0*x2^2 + 2*x2^3 + 3*x1*x2^2", X2), (0, 0, 1), (1, 0, 0))
    assert bryant.transverse_at(flex, (1, 0, 0))
    tangent = HypersurfaceData(parse_poly("x0^2*x1 + 2*x2^3 + 3*x1*x2^2", X2), (0, 0, 1), (1, 0, 0))
    assert not bryant.transverse_at(tangent, (1, 0, 0))
    on_h0 = HypersurfaceData(parse_poly("x0*x1*x2 + x2^3 - x1^3", X2), (0, 0, 1), (1, 0, 0))
    assert bryant.transverse_at(on_h0, (0, 1, 1))
    with pytest.raises(ValueError):
        bryant.transverse_at(flex, (1, 1, 1))


# hypersurface files


def test_hypersurface_file_round_trip():
    Z = bryant.kummer_from_node()
    again = bryant.parse_hypersurface(bryant.format_hypersurface(Z))
    assert again.F == Z.F and again.p0 == Z.p0 and again.H0 == Z.H0


@pytest.mark.parametrize("text", [
    "F = x0^2\np0 = [0, 1]\n",
    "F = x0^2\np0 = [0,0,1]\nH0 = [1,0,0]\nH0 = [1,0,0]\n",
    "F = x0 + \np0 = [0,0,1]\nH0 = [1,0,0]\n",
    "F = x0*x1 + x2\np0 = [0,0,1]\nH0 = [1,0,0]\n",
    "G = x0\np0 = [0,0,1]\nH0 = [1,0,0]\n",
    "F = x0*x1\np0 = [0,0,1]\nH0 = [1,0]\n",
])
def test_hypersurface_file_errors(text):
    with pytest.raises(bryant.HypersurfaceFormatError):
        bryant.parse_hypersurface(text)


# psi


def test_psi_of_cubic_is_twisted_cubic():
    chart = bryant.psi_chart(parse_poly("x1^3", ("x1",)))
    assert [str(c) for c in chart.components] == ["1", "x1", "3*x1^2", "x1^3"]
    assert contact.find_symplectic_forms(chart).nondegenerate


def test_psi_of_triple_product():
    chart = bryant.psi_chart(parse_poly("x1*x2*x3", ("x1", "x2", "x3")))
    assert chart.N == 7
    assert contact.find_symplectic_forms(chart).nondegenerate
    assert contact.is_legendrian(chart, bryant.psi_form(3, 3))


@pytest.mark.parametrize("q", ["x1^2 + x2^2", "x1*x2", "x1^2 + x2^2 + x3^2", "x1*x2 - x3^2"])
def test_psi_of_quadric_times_variable(q):
    names = tuple(sorted(set(v for v in ("x1", "x2", "x3") if v in q)))
    last = f"x{len(names) + 1}"
    variables = names + (last,)
    P = parse_poly(q, variables) * MultiPoly.var(last, variables)
    chart = bryant.psi_chart(P)
    assert contact.is_legendrian(chart, bryant.psi_form(len(variables), 3))


def test_psi_homogeneous_chart_agrees_on_patch():
    P = parse_poly("x1*x2*x3", ("x1", "x2", "x3"))
    hom = bryant.psi_map_homogeneous(P)
    chart = bryant.psi_chart(P)
    on_patch = [c.substitute({"x0": 1}).extend(chart.params) for c in hom]
    assert on_patch == chart.components


def test_psi_rejects_quadrics_and_inhomogeneous():
    with pytest.raises(ValueError):
        bryant.psi_chart(parse_poly("x1^2 + x2^2", ("x1", "x2")))
    with pytest.raises(ValueError):
        bryant.psi_chart(parse_poly("x1^3 + x2", ("x1", "x2")))


@pytest.mark.parametrize("text, c", [
    ("x1*x2*x3", 1), ("x1^3", 27), ("x1^3 + x2^3", None), ("x1^3 + x2^3 + x3^3", None), ("x1^2*x2", 4),
])
def test_self_duality(text, c):
    P = parse_poly(text, tuple(sorted(set(v for v in ("x1", "x2", "x3") if v in text))))
    assert bryant.self_duality_check(P) == c
    if c is not None:
        composed = P.substitute({v: P.diff(v) for v in P.variables}).extend(P.variables)
        assert composed == P ** (P.total_degree() - 1) * c


@pytest.mark.parametrize("text, size", [("x1*x2*x3", 1), ("x1^3 + x2^3 + x3^3", 4), ("x1^2*x2", 1)])
def test_gradient_fiber_sizes(text, size):
    names = tuple(sorted(set(v for v in ("x1", "x2", "x3") if v in text)))
    mode, counts = bryant.gradient_degree_sample(parse_poly(text, names), 1000003, 20, seed=1)
    assert mode == size
    assert len(counts) == 20


def test_gradient_fibers_by_brute_force_small_field():
    # Fermat cubic over F_13 on the patch x3 = 1: gradients agree exactly on sign changes of x1, x2
    p = 13
    fibers = {}
    for a in range(1, p):
        for b in range(1, p):
            fibers.setdefault((3 * a * a % p, 3 * b * b % p), set()).add((a, b))
    assert {len(v) for v in fibers.values()} == {4}


def test_gradient_sampler_requires_enough_trials():
    with pytest.raises(ValueError):
        bryant.gradient_degree_sample(parse_poly("x1*x2*x3", ("x1", "x2", "x3")), 1000003, 5)


# indeterminacy points and general position


def test_conic_section_has_two_tangent_lines():
    Z = surface("x0*x3 - x1*x2 + x2^2 - x3^2")
    r = bryant.indeterminacy_points(Z)
    assert r.degree == r.expected_degree == 2 and r.squarefree


def test_fermat_quartic_section():
    F = parse_poly("x0^4 + x1^4 + x2^4 + x3^4", X3)
    rng = random.Random(7)
    results = []
    for _ in range(5):
        p0 = (0, rng.randint(1, 9), rng.randint(-9, 9), rng.randint(-9, 9))
        if F.evaluate(p0) == 0:
            continue
        results.append(bryant.indeterminacy_points(HypersurfaceData(F, p0, (1, 0, 0, 0))))
    assert all(r.degree == 12 for r in results)
    assert any(r.squarefree for r in results)


def test_p0_on_section_is_rejected():
    with pytest.raises(ValueError):
        bryant.indeterminacy_points(surface("x0*x3 - x1*x2 + x2^2 - x3^2", p0=(0, 1, 1, 0)))


def test_jet_witness_examples():
    v = ("x0", "x2", "x3")
    assert bryant.jet_witness(parse_poly("x2 + x3^2 + x0^3", v)).q33 == 1
    w = bryant.jet_witness(parse_poly("x2 + x0*x3", v))
    assert w.q33 == 0 and not w.passed


@pytest.mark.parametrize("seed", range(3))
def test_witness_at_rational_indeterminacy_point(seed):
    Z, pt = bryant.rational_indeterminacy_instance(seed)
    assert Z.value(pt) == 0
    assert bryant.second_form_witness(Z, pt).passed


def test_report_on_smooth_quadric():
    Z = surface("x0*x3 - x1*x2 + x2^2 - x3^2")
    checks = bryant.general_position_report(Z)
    exact = [c for c in checks if c.status != "SAMPLED"]
    assert all(c.status == "PASS" for c in exact), exact
    assert any(c.status == "SAMPLED" for c in checks)


def test_kummer_quartic_has_sixteen_nodes():
    Z = bryant.kummer_from_node()
    assert Z.degree == 4 and len(Z.singular) == 16
    for s in Z.singular:
        assert Z.value(s) == 0 and not any(Z.gradient_at(s))
    checks = {c.name: c.status for c in bryant.general_position_report(Z)}
    assert checks["no bitangent plane through p0"] == "SAMPLED"
    assert all(s == "PASS" for name, s in checks.items() if name != "no bitangent plane through p0")


def test_h0_through_node_fails():
    Z = bryant.kummer_from_node(H0=(1, -1, 2, 0))
    checks = {c.name: c.status for c in bryant.general_position_report(Z)}
    assert checks["H0 misses listed singular points"] == "FAIL"
    assert checks["section curve smooth"] == "FAIL"
