import math
import threading

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from _gen import random_poly_row, random_repr42
from nullforge.catalog import build_example
from nullforge.errors import DegenerateWronskianError, HypothesisError
from nullforge.expr_dsl import as_fn, derivative
from nullforge.null_repr import (
    CurveFn, Repr31Curve, Repr42Curve, ReprData31, ReprData42, check_admissible,
    curve_derivative_e31, curve_derivative_e42, forward_e31, forward_e31_full, forward_e42,
    forward_e42_curve, inverse_e31, inverse_e31_data, inverse_e42, inverse_e42_data,
    lemma_residuals, lemma_scales, p11_e31,
)
from nullforge.phi_core import Row2
from nullforge.pseudo_euclid import PEVector, Signature, inner_product, quadratic_form

seeds = st.integers(0, 2 ** 32 - 1)
XS = np.linspace(-1.0, 1.0, 20)


def alpha1_data(p, q, r, s):
    return ReprData42.from_functions(*("exp(%r*x)" % float(c) for c in (p, q, r, s)))


def alpha2_data(p=2, q=1):
    return ReprData42.from_functions("cos(%d*x)" % p, "sin(%d*x)" % p, "cos(%d*x)" % q, "sin(%d*x)" % q)


def alpha2_closed(p=2, q=1):
    return build_example("alpha2", p=p, q=q).closed_form


# -- forward map -------------------------------------------------------------------

def test_forward_example_1_at_zero():
    v = forward_e42(alpha1_data(2, 1, 1, 0), 0.0)
    assert isinstance(v, PEVector)
    np.testing.assert_allclose(v.coords, (-0.5, -0.5, -0.5, 0.0), atol=1e-15)


def test_forward_example_2_at_zero():
    np.testing.assert_allclose(forward_e42(alpha2_data(), 0.0).coords, (-0.75, 0.0, 0.25, 0.0), atol=1e-15)


def test_equal_rates_are_degenerate():
    with pytest.raises(DegenerateWronskianError) as info:
        forward_e42(alpha1_data(2, 1, 1, 1), 0.3)
    assert info.value.xi == 0.3


def test_degeneracy_threshold_is_relative():
    p2 = Row2("1e7*exp(x)", "1e7*exp(x*(1 + 1e-15))")
    with pytest.raises(DegenerateWronskianError):
        check_admissible(p2.jet(0.2, 1), 0.2)
    check_admissible(Row2("1e-3*cos(x)", "1e-3*sin(x)").jet(0.2, 1), 0.2)


def test_vectorised_forward_matches_scalar():
    d = alpha2_data(3, 2)
    pts = forward_e42(d, XS)
    assert pts.shape == (20, 4)
    np.testing.assert_allclose(pts[5], forward_e42(d, float(XS[5])).coords, rtol=1e-15)


@pytest.mark.parametrize("xi", [0.0, 0.5, 1.0])
def test_example_2_derivative_is_null_and_closed_form(xi):
    v = curve_derivative_e42(alpha2_data(), xi)
    assert abs(inner_product(v, v)) <= 1e-10
    want = 0.25 * np.array([3 * math.sin(xi), -3 * math.cos(xi), -3 * math.sin(3 * xi), -3 * math.cos(3 * xi)])
    np.testing.assert_allclose(v.coords, want, atol=1e-14)


def test_derivative_matches_finite_difference_of_forward():
    rng = np.random.default_rng(5)
    d = random_repr42(rng, XS, margin=1e-2)
    h = 1e-5
    for xi in rng.uniform(-1, 1, 20):
        fd = (np.array(forward_e42(d, xi + h).coords) - np.array(forward_e42(d, xi - h).coords)) / (2 * h)
        np.testing.assert_allclose(curve_derivative_e42(d, xi).coords, fd, atol=1e-6, rtol=1e-6)


def test_constant_curve_has_zero_derivative():
    d = alpha1_data(0, 0, 1, 0)
    assert max(map(abs, curve_derivative_e42(d, 0.4).coords)) <= 1e-12
    np.testing.assert_allclose(forward_e42(d, 0.4).coords, forward_e42(d, -0.9).coords, atol=1e-14)


def test_symbolic_forward_curve_agrees():
    d = alpha2_data()
    np.testing.assert_allclose(forward_e42_curve(d).position(XS), forward_e42(d, XS), rtol=1e-13, atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_forward_map_is_null(seed):
    d = random_repr42(np.random.default_rng(seed), XS)
    bp = curve_derivative_e42(d, XS)
    q = np.abs(quadratic_form(bp, Signature.E42))
    assert np.all(q <= 1e-9 * np.maximum(np.sum(bp * bp, axis=-1), 1e-300))


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_scaling_both_rows_leaves_curve_unchanged(seed):
    d = random_repr42(np.random.default_rng(seed), XS)
    k = as_fn("2 + sin(x)")
    np.testing.assert_allclose(forward_e42(d.scaled(k), XS), forward_e42(d, XS), rtol=1e-9, atol=1e-9)


# -- inverse map ---------------------------------------------------------------------

def _roundtrip(beta, k, mode):
    return Repr42Curve(inverse_e42_data(beta, k, mode)).position(XS) - beta.position(XS)


@pytest.mark.parametrize("k", ["1", "2 + sin(x)"])
@pytest.mark.parametrize("mode", ["standard", "alternative"])
def test_example_2_roundtrip(k, mode):
    assert np.max(np.abs(_roundtrip(alpha2_closed(), k, mode))) <= 1e-8


def test_k_invariance_of_inverse():
    beta = alpha2_closed(3, 1)
    a = Repr42Curve(inverse_e42_data(beta, "1")).position(XS)
    b = Repr42Curve(inverse_e42_data(beta, "exp(x) + 0.5")).position(XS)
    np.testing.assert_allclose(a, b, atol=1e-8)


def test_alternative_rows_are_rescaled_standard_rows():
    beta = alpha2_closed()
    std = inverse_e42_data(beta, 1, "standard")
    alt = inverse_e42_data(beta, 1, "alternative")
    b1, b2, b3, b4 = beta.padded()
    ratio = -(b1.diff() - b3.diff()) / (b2.diff() + b4.diff())
    for f, g in zip(std.functions, alt.functions):
        np.testing.assert_allclose((f * ratio)(XS), g(XS), atol=1e-12)


def test_example_1_alternative_mode_is_identically_degenerate():
    beta = build_example("alpha1").closed_form
    d = inverse_e42_data(beta, 1, "alternative")
    np.testing.assert_array_equal(d.p2.jet(XS, 0), 0.0)
    with pytest.raises(DegenerateWronskianError):
        Repr42Curve(d).position(XS)


def test_pointwise_inverse_values():
    beta = alpha2_closed()
    vals = inverse_e42(beta, "1", "standard", 0.3)
    d = inverse_e42_data(beta, 1)
    assert vals == tuple(f(0.3) for f in d.functions)


def test_vanishing_k_is_rejected():
    with pytest.raises(HypothesisError):
        inverse_e42(alpha2_closed(), "x", "standard", 0.0)


def test_unknown_mode():
    with pytest.raises(ValueError):
        inverse_e42_data(alpha2_closed(), 1, "sideways")


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_random_roundtrip(seed):
    rng = np.random.default_rng(seed)
    beta = forward_e42_curve(random_repr42(rng, XS))
    d = inverse_e42_data(beta, "2 + sin(x)")
    try:
        check_admissible(d.p2.jet(XS, 1), XS)
    except DegenerateWronskianError:
        return
    err = np.abs(Repr42Curve(d).position(XS) - beta.position(XS))
    assert np.all(err <= 1e-8 * np.maximum(1.0, np.abs(beta.position(XS))))


# -- E^3_1 ------------------------------------------------------------------------------

EX3 = ReprData31("exp(4*x)", "exp(2*x)", "exp(x)")
EX5 = ReprData31("sin(2*x)", "cos(x)", "sin(x)")


def test_example_3_at_zero():
    v = forward_e31(EX3, 0.0)
    assert v.signature is Signature.E31
    np.testing.assert_allclose(v.coords, (-0.25, -1.5, -1.25), atol=1e-13)


@pytest.mark.parametrize("xi", [0.1, 0.5, 1.0])
def test_example_3_p11(xi):
    assert abs(p11_e31(EX3, xi) - (3 * math.exp(3 * xi) - 3 * math.exp(2 * xi))) <= 1e-8


def test_example_5_p11():
    for xi in np.linspace(-0.99, 0.99, 25):
        assert abs(p11_e31(EX5, xi) + 2 * (math.cos(xi) - 1) ** 2) <= 1e-8


def test_fourth_component_vanishes():
    for xi in (-0.5, 0.2, 0.9):
        assert abs(forward_e31_full(EX3, xi)[3]) <= 1e-9
        assert abs(forward_e31_full(EX5, xi)[3]) <= 1e-9


def test_e31_derivative_is_null():
    for xi in (-0.5, 0.2, 0.9):
        v = curve_derivative_e31(EX5, xi)
        assert abs(inner_product(v, v)) <= 1e-9 * max(1.0, v.norm_sq())


def test_integration_constant_translates_curve():
    shifts = [np.subtract(forward_e31(EX5.with_constant(0.7), xi).coords, forward_e31(EX5, xi).coords)
              for xi in (-0.6, 0.1, 0.8)]
    np.testing.assert_allclose(shifts[0], shifts[1], atol=1e-10)
    np.testing.assert_allclose(shifts[0], shifts[2], atol=1e-10)
    np.testing.assert_allclose(shifts[0], (-0.175, 0.0, -0.175), atol=1e-10)


def test_p21_zero_in_range_is_rejected():
    with pytest.raises(HypothesisError):
        forward_e31(EX5, 2.0)


def test_inverse_e31_p21_at_quarter_pi():
    alpha5 = build_example("alpha5").closed_form
    xi = math.pi / 4
    P12, P21, P22 = inverse_e31(alpha5, "1", xi)
    assert abs(P21 - (-3 * math.sin(xi) ** 2 * math.cos(xi))) <= 1e-10
    assert abs(P21 - derivative(as_fn("-sin(x)^3"))(xi)) <= 1e-10


def test_inverse_e31_roundtrip_with_anchor():
    alpha5 = build_example("alpha5").closed_form
    data = inverse_e31_data(alpha5, 1, xi0=0.6)
    xs = np.linspace(0.1, 1.2, 23)
    err = np.max(np.abs(Repr31Curve(data).position(xs) - alpha5.position(xs)))
    assert err <= 1e-7


def test_constant_beta2_is_rejected():
    flat = CurveFn.of(["x", "1", "x"])
    with pytest.raises(HypothesisError):
        inverse_e31_data(flat, 1, xi0=0.2)


def test_repr31_cache_is_safe_under_threads():
    curve = Repr31Curve(EX5)
    xs = np.linspace(-0.9, 0.9, 12)
    want = Repr31Curve(EX5).position(xs)
    results = [None] * 6

    def work(i):
        results[i] = curve.position(xs)

    threads = [threading.Thread(target=work, args=(i,)) for i in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for r in results:
        np.testing.assert_array_equal(r, want)


# -- phi identities ----------------------------------------------------------------------

def _sympy_identities():
    t = sp.symbols("t")
    a, b, c, d = (sp.Function(n)(t) for n in "abcd")
    x, y = (a, b), (c, d)
    E = lambda r: (r[0], -r[1])  # noqa: E731
    L = lambda r: (r[1], r[0])  # noqa: E731
    D = lambda r, k=1: tuple(sp.diff(u, t, k) for u in r)  # noqa: E731
    det = lambda u, v: u[0] * v[1] - u[1] * v[0]  # noqa: E731

    def phi(u, v, n):
        return -det(u, D(v, n + 1)) + det(D(u, n + 1), v)

    pairs = [(x, y, 1), (E(x), L(y), 1), (E(x), y, -1), (x, L(y), -1)]
    out = []
    for n in (0, 1):
        lhs = sum(s * phi(u, v, n) ** 2 for u, v, s in pairs)
        out.append(sp.expand(lhs - 4 * det(x, D(x, n + 1)) * det(y, D(y, n + 1))))
    mixed = sum(s * phi(u, v, 1) * phi(u, v, 0) for u, v, s in pairs)
    out.append(sp.expand(mixed - 2 * det(x, D(x, 2)) * det(y, D(y)) - 2 * det(x, D(x)) * det(y, D(y, 2))))
    return out


def test_phi_identities_hold_symbolically():
    assert _sympy_identities() == [0, 0, 0]


def test_lemma_residuals_on_constant_rows_are_exactly_zero():
    x, y = Row2("2", "-3"), Row2("0.5", "4")
    for n in (0, 1):
        assert lemma_residuals(x, y, n, 0.3) == (0.0, 0.0)


def test_lemma_residuals_on_example_2_rows():
    d = alpha2_data()
    for n in (0, 1):
        r1, r2 = lemma_residuals(d.p1, d.p2, n, 0.7)
        assert abs(r1) <= 1e-10 and abs(r2) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(seeds, st.floats(-1, 1))
def test_lemma_residuals_on_random_rows(seed, xi):
    rng = np.random.default_rng(seed)
    x, y = random_poly_row(rng), random_poly_row(rng)
    for n in (0, 1):
        res, scale = lemma_residuals(x, y, n, xi), lemma_scales(x, y, n, xi)
        assert abs(res[0]) <= 1e-9 * max(scale[0], 1e-300)
        assert abs(res[1]) <= 1e-9 * max(scale[1], 1e-300)
