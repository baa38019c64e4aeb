import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _gen import random_repr42
from nullforge.catalog import build_example
from nullforge.errors import DegenerateMetricError, HypothesisError, SignatureError
from nullforge.null_repr import CurveFn, Repr42Curve
from nullforge.pseudo_euclid import Signature, quadratic_form
from nullforge.surfaces import (
    FunctionCurve, Grid, TranslationSurface, classify_points, eval_surface,
    mean_curvature_oracle, verify_minimality,
)

F4 = build_example("f4")
F5 = build_example("f5")
GRID21 = Grid.uniform((-1.0, 1.0), 21)


def test_eval_surface_goldens():
    np.testing.assert_allclose(eval_surface(F4.surface, 0, 0).coords, (-0.5, -1.0, -0.5), atol=1e-13)
    np.testing.assert_allclose(eval_surface(F5.surface, 0, 0).coords, (-0.5, -0.5, 1.0), atol=1e-13)


def test_zero_second_generator():
    g1 = build_example("alpha5").closed_form
    s = TranslationSurface(g1, CurveFn.of(["0", "0", "0"]))
    for a in (-0.3, 0.8):
        np.testing.assert_array_equal(eval_surface(s, a, 12.5).coords, g1.position(a))


def test_sample_shape_and_values():
    grid = Grid.uniform((-1, 1), 4, (0, 0.5), 3)
    pts = F5.closed_surface.sample(grid)
    assert pts.shape == (4, 3, 3) and grid.shape == (4, 3)
    np.testing.assert_allclose(pts[2, 1], F5.closed_surface.position(grid.xi1[2], grid.xi2[1]), rtol=1e-15)


@pytest.mark.parametrize("ex", [F4, F5], ids=["f4", "f5"])
def test_catalog_surfaces_are_minimal(ex):
    rep = verify_minimality(ex.surface, GRID21, tol=1e-9)
    assert rep.passed, str(rep)
    assert ex.surface.generators_null(GRID21)


def test_non_null_generator_fails_with_location():
    s = TranslationSurface(CurveFn.of(["x", "0", "0"]), build_example("alpha5").closed_form)
    rep = verify_minimality(s, GRID21, tol=1e-8)
    assert not rep.passed
    assert rep.max_residual == pytest.approx(1.0)
    assert rep.worst_point[0] in GRID21.xi1
    assert "FAIL" in str(rep)
    with pytest.raises(HypothesisError):
        s.require_null_generators(GRID21)


def test_mixed_signature_generators_rejected():
    with pytest.raises(SignatureError):
        TranslationSurface(build_example("alpha2").curve, build_example("alpha5").curve)


def test_diagonal_of_doubled_curve_is_not_immersed():
    g = build_example("alpha5").closed_form
    s = TranslationSurface(g, g)
    grid = Grid.uniform((0.2, 1.0), 9)
    flags = classify_points(s, grid)
    assert not flags.immersed.diagonal().any()
    off = ~np.eye(9, dtype=bool)
    assert flags.immersed[off].all()


def test_immersion_flag_matches_singular_value_rank():
    grid = Grid.uniform((0.2, 1.0), 17)
    s = F5.surface
    flags = classify_points(s, grid)
    d1 = np.asarray(s.gamma1.derivative(grid.xi1))
    d2 = np.asarray(s.gamma2.derivative(grid.xi2))
    for i in range(17):
        for j in range(17):
            sv = np.linalg.svd(np.stack([d1[i], d2[j]]), compute_uv=False)
            assert flags.immersed[i, j] == bool(sv[1] > 1e-8 * sv[0])


def test_position_pairing_at_origin_of_f4():
    g1, g2 = F4.extras["generators"]
    value = float(quadratic_form(g1.closed_form.position(0.0), Signature.E31, g2.closed_form.position(0.0)))
    assert value == pytest.approx(0.25, abs=1e-14)
    flags = classify_points(F4.surface, Grid(np.array([0.0]), np.array([0.0])))
    assert flags.chen_ok[0, 0]


def test_translation_structure():
    rng = np.random.default_rng(1)
    for s in (F4.surface, F5.surface):
        for a, a2, b, b2 in rng.uniform(-1, 1, (10, 4)):
            d1 = s.position(a, b) - s.position(a, b2)
            d2 = s.position(a2, b) - s.position(a2, b2)
            scale = max(np.abs(s.position(a, b)).max(), np.abs(s.position(a2, b)).max(), 1.0)
            assert np.max(np.abs(d1 - d2)) <= 8 * np.finfo(float).eps * scale


def test_oracle_on_catalog_points():
    assert mean_curvature_oracle(F4.surface, 0.3, 0.4, h=1e-4) < 1e-5
    assert mean_curvature_oracle(F5.surface, 0.5, 0.7, h=1e-4) < 1e-5


def control_surface():
    return TranslationSurface(FunctionCurve(lambda t: (t, 0.0, t * t, 0.0), "e42"),
                              FunctionCurve(lambda t: (0.0, t, t * t, 0.0), "e42"))


def test_oracle_sees_non_minimal_control():
    assert mean_curvature_oracle(control_surface(), 0.1, 0.6) > 1e-2
    assert mean_curvature_oracle(control_surface(), 0.3, 0.7) > 1e-2


def test_oracle_matches_analytic_mean_curvature_of_control():
    # graph z = a^2 + b^2 in E42 coordinates (x1, x2, x3): closed-form H at a timelike point
    a, b = 0.1, 0.6
    f1, f2 = np.array([1, 0, 2 * a, 0.0]), np.array([0, 1, 2 * b, 0.0])
    f11 = f22 = np.array([0, 0, 2.0, 0])
    eps = np.array([1, 1, -1, -1.0])
    g = np.array([[f1 @ (eps * f1), f1 @ (eps * f2)], [f2 @ (eps * f1), f2 @ (eps * f2)]])
    gi = np.linalg.inv(g)
    lap = gi[0, 0] * f11 + gi[1, 1] * f22
    frame = (f1, f2)
    tang = sum(gi[i, j] * (lap @ (eps * frame[j])) * frame[i] for i in range(2) for j in range(2))
    want = np.linalg.norm(0.5 * (lap - tang))
    assert mean_curvature_oracle(control_surface(), a, b) == pytest.approx(want, rel=1e-6)


def test_oracle_rejects_degenerate_metric():
    g = build_example("alpha5").closed_form
    with pytest.raises(DegenerateMetricError):
        mean_curvature_oracle(TranslationSurface(g, g), 0.5, 0.5)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_surfaces_from_random_null_curves_are_minimal(seed):
    rng = np.random.default_rng(seed)
    xs = np.linspace(-1, 1, 11)
    s = TranslationSurface(Repr42Curve(random_repr42(rng, xs, 1e-2)),
                           Repr42Curve(random_repr42(rng, xs, 1e-2)))
    rep = verify_minimality(s, Grid(xs, xs), tol=1e-8)
    assert rep.passed, str(rep)
