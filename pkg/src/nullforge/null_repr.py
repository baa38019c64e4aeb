"""Integration-free representation of null curves in E^4_2 and its E^3_1 case.

Forward direction: four scalar functions P11, P12, P21, P22 (rows
p1 = (P11, P12), p2 = (P21, P22)) give the null curve

    beta = (phi(p1, p2), phi(p1 E, p2 L), phi(p1 E, p2), phi(p1, p2 L)) / (4 W)

with W = det(p2; p2').  The inverse recovers generating data from a null
curve and an arbitrary nonvanishing factor k.  In E^3_1 (beta4 = 0) the
entry P11 is fixed, up to a constant C, by a one-dimensional integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegenerateWronskianError, HypothesisError
from .expr_dsl import ScalarFn, as_fn, derivative
from .phi_core import (
    MatrixTag, Row2, det2, phi_from_jets, sign_jet, wronskian_from_jet,
)
from .pseudo_euclid import PEVector, Signature
from .quadrature import DEFAULT_TOL, integrate_adaptive

DEGENERACY_RTOL = 1e-12
E, L = MatrixTag.E, MatrixTag.L


def _is_scalar(xi) -> bool:
    return np.ndim(xi) == 0


# -- data types ------------------------------------------------------------------

@dataclass(frozen=True)
class ReprData42:
    p1: Row2
    p2: Row2

    @classmethod
    def from_functions(cls, P11, P12, P21, P22) -> ReprData42:
        return cls(Row2(P11, P12), Row2(P21, P22))

    @property
    def functions(self):
        return (self.p1.c1, self.p1.c2, self.p2.c1, self.p2.c2)

    def jets(self, xi):
        return self.p1.jet(xi, 2), self.p2.jet(xi, 2)

    def scaled(self, k) -> ReprData42:
        return ReprData42(self.p1.scaled(k), self.p2.scaled(k))


@dataclass(frozen=True)
class ReprData31:
    """Generating data for an E^3_1 null curve; P11 is built by quadrature."""

    P12: ScalarFn
    P21: ScalarFn
    P22: ScalarFn
    xi0: float = 0.0
    C: float = 0.0
    tol: float = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        for name in ("P12", "P21", "P22"):
            object.__setattr__(self, name, as_fn(getattr(self, name)))
        object.__setattr__(self, "xi0", float(self.xi0))
        object.__setattr__(self, "C", float(self.C))

    @property
    def p2(self) -> Row2:
        return Row2(self.P21, self.P22)

    @cached_property
    def integrand(self) -> ScalarFn:
        """(P12' P22 - P12 P22') / P21^2."""
        return (self.P12.diff() * self.P22 - self.P12 * self.P22.diff()) / self.P21 ** 2

    def with_constant(self, C: float) -> ReprData31:
        return ReprData31(self.P12, self.P21, self.P22, self.xi0, C, self.tol)


@dataclass(frozen=True)
class CurveFn:
    """A curve whose components are symbolic scalar functions."""

    components: tuple
    signature: Signature

    def __post_init__(self):
        comps = tuple(as_fn(c) for c in self.components)
        sig = Signature.parse(self.signature)
        if len(comps) != sig.dim:
            raise ValueError("%s curve needs %d components" % (sig.name, sig.dim))
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "signature", sig)

    @classmethod
    def of(cls, components, signature=None) -> CurveFn:
        components = tuple(components)
        sig = Signature.for_dim(len(components)) if signature is None else signature
        return cls(components, sig)

    def diff(self) -> CurveFn:
        return CurveFn(tuple(c.diff() for c in self.components), self.signature)

    def padded(self) -> tuple:
        """Components as an E^4_2 curve (beta4 = 0 appended for E^3_1)."""
        return self.components + (as_fn(0),) * (4 - len(self.components))

    def _sample(self, comps, xi):
        if _is_scalar(xi):
            return np.array([c(float(xi)) for c in comps])
        xs = np.asarray(xi, dtype=float)
        return np.stack([c(xs) for c in comps], axis=-1)

    def position(self, xi):
        return self._sample(self.components, xi)

    def derivative(self, xi):
        return self._sample(self.diff().components, xi)

    def __call__(self, xi) -> PEVector:
        return PEVector(tuple(self.position(float(xi))), self.signature)


# -- E^4_2 forward map ----------------------------------------------------------

def check_admissible(p2j: np.ndarray, xi) -> None:
    """Raise when |det(p2; p2')| < 1e-12 (1 + max |p2|, |p2'|)^2 anywhere."""
    W = wronskian_from_jet(p2j, 1)
    scale = 1.0 + np.max(np.abs(p2j[:2]), axis=(0, 1))
    bad = np.abs(W) < DEGENERACY_RTOL * scale ** 2
    if np.any(bad):
        i = int(np.argmax(np.ravel(bad)))
        where = float(np.ravel(np.broadcast_to(xi, np.shape(bad)))[i])
        raise DegenerateWronskianError(
            "det(p2; p2') = %.3g is degenerate at xi = %r" % (np.ravel(W)[i], where), xi=where)


def _pairs(p1j, p2j):
    p1E, p2L = sign_jet(p1j, E), sign_jet(p2j, L)
    return ((p1j, p2j), (p1E, p2L), (p1E, p2j), (p1j, p2L))


def beta_from_jets(p1j, p2j) -> np.ndarray:
    W = wronskian_from_jet(p2j, 1)
    return np.array([phi_from_jets(x, y, 0) for x, y in _pairs(p1j, p2j)]) / (4.0 * W)


def beta_prime_from_jets(p1j, p2j) -> np.ndarray:
    """Closed-form derivative: (phi_1 W1 - phi_0 W2) / (4 W1^2)."""
    W1 = wronskian_from_jet(p2j, 1)
    W2 = wronskian_from_jet(p2j, 2)
    out = [
        phi_from_jets(x, y, 1) * W1 - phi_from_jets(x, y, 0) * W2
        for x, y in _pairs(p1j, p2j)
    ]
    return np.array(out) / (4.0 * W1 ** 2)


def _to_output(values, xi, signature=Signature.E42):
    values = values[: signature.dim]
    if _is_scalar(xi):
        return PEVector(tuple(values), signature)
    return np.moveaxis(values, 0, -1)


def forward_e42(d: ReprData42, xi):
    """beta(xi) as a PEVector, or an (N, 4) array when ``xi`` is an array."""
    p1j, p2j = d.jets(xi)
    check_admissible(p2j, xi)
    return _to_output(beta_from_jets(p1j, p2j), xi)


def curve_derivative_e42(d: ReprData42, xi):
    p1j, p2j = d.jets(xi)
    check_admissible(p2j, xi)
    return _to_output(beta_prime_from_jets(p1j, p2j), xi)


def forward_e42_curve(d: ReprData42) -> CurveFn:
    """The forward map as a symbolic curve (differentiable to any order)."""
    from .phi_core import apply_signature, phi_expr, wronskian_expr

    p1, p2 = d.p1, d.p2
    p1E, p2L = apply_signature(p1, E), apply_signature(p2, L)
    denom = 4 * wronskian_expr(p2, 1)
    comps = [phi_expr(x, y) / denom for x, y in ((p1, p2), (p1E, p2L), (p1E, p2), (p1, p2L))]
    return CurveFn(tuple(comps), Signature.E42)


# -- E^4_2 inverse map ------------------------------------------------------------

MODES = ("standard", "alternative")


def inverse_e42_data(beta: CurveFn, k=1, mode: str = "standard") -> ReprData42:
    """Generating data of a null curve, as symbolic functions.

    ``mode="alternative"`` rewrites the data with the null condition; its
    rows are the standard rows times -(b1' - b3') / (b2' + b4'), so both
    modes give the same curve wherever both are admissible.
    """
    k = as_fn(k)
    b1, b2, b3, b4 = beta.padded()
    d1, d2, d3, d4 = (c.diff() for c in (b1, b2, b3, b4))
    if mode == "standard":
        P11 = -2 * ((b1 + b3) * (d2 + d4) - (b2 + b4) * (d1 + d3)) * k
        P12 = -2 * ((b2 - b4) * (d2 + d4) + (b1 - b3) * (d1 + d3)) * k
        P21 = (d2 + d4) * k
        P22 = (d1 + d3) * k
    elif mode == "alternative":
        P11 = -2 * (-(b1 + b3) * (d1 - d3) - (b2 + b4) * (d2 - d4)) * k
        P12 = -2 * (-(b2 - b4) * (d1 - d3) + (b1 - b3) * (d2 - d4)) * k
        P21 = -(d1 - d3) * k
        P22 = (d2 - d4) * k
    else:
        raise ValueError("mode must be one of %s" % (MODES,))
    return ReprData42.from_functions(P11, P12, P21, P22)


def inverse_e42(beta: CurveFn, k, mode: str, xi) -> tuple:
    """(P11, P12, P21, P22) evaluated at ``xi``."""
    k = as_fn(k)
    if _is_scalar(xi) and k(float(xi)) == 0.0:
        raise HypothesisError("k vanishes at xi = %r" % xi)
    d = inverse_e42_data(beta, k, mode)
    return tuple(f(xi) for f in d.functions)


# -- E^3_1 specialisation -------------------------------------------------------------

def check_e31_hypotheses(d: ReprData31, a: float, b: float, samples: int = 129) -> None:
    """Raise if P21 vanishes or changes sign on [a, b], or det(p2; p2') degenerates."""
    lo, hi = min(a, b), max(a, b)
    xs = np.linspace(lo, hi, samples) if hi > lo else np.array([lo])
    p21 = d.P21(xs)
    if np.any(p21 == 0.0) or np.any(np.sign(p21) != np.sign(p21[0])):
        raise HypothesisError("P21 = %s vanishes on [%g, %g]" % (d.P21, lo, hi))
    check_admissible(d.p2.jet(xs, 1), xs)


def _p11_jet(d: ReprData31, xi: float, integral=None):
    if integral is None:
        integral = p11_integral(d, xi)
    g = d.integrand
    t = integral + d.C
    P21, dP21, ddP21 = (derivative(d.P21, n)(xi) for n in range(3))
    gv, dg = g(xi), g.diff()(xi)
    return np.array([P21 * t, dP21 * t + P21 * gv, ddP21 * t + 2 * dP21 * gv + P21 * dg])


def p11_integral(d: ReprData31, xi: float) -> float:
    """Integral of (P12' P22 - P12 P22') / P21^2 from xi0 to xi."""
    xi = float(xi)
    check_e31_hypotheses(d, d.xi0, xi)
    return integrate_adaptive(d.integrand, d.xi0, xi, d.tol).value


def p11_e31(d: ReprData31, xi: float) -> float:
    """P11(xi) = P21(xi) (integral + C)."""
    return float(_p11_jet(d, float(xi))[0])


def _e31_jets(d: ReprData31, xi: float, integral=None):
    P11 = _p11_jet(d, xi, integral)
    P12 = np.array([derivative(d.P12, n)(xi) for n in range(3)])
    p1j = np.stack([P11, P12], axis=1)
    p2j = d.p2.jet(xi, 2)
    check_admissible(p2j, xi)
    return p1j, p2j


def forward_e31_full(d: ReprData31, xi: float) -> PEVector:
    """All four components of the assembled E^4_2 curve; beta4 should vanish."""
    p1j, p2j = _e31_jets(d, float(xi))
    return PEVector(tuple(beta_from_jets(p1j, p2j)), Signature.E42)


def forward_e31(d: ReprData31, xi: float) -> PEVector:
    p1j, p2j = _e31_jets(d, float(xi))
    return PEVector(tuple(beta_from_jets(p1j, p2j)[:3]), Signature.E31)


def curve_derivative_e31(d: ReprData31, xi: float) -> PEVector:
    p1j, p2j = _e31_jets(d, float(xi))
    return PEVector(tuple(beta_prime_from_jets(p1j, p2j)[:3]), Signature.E31)


def inverse_e31(beta: CurveFn, k, xi) -> tuple:
    """(P12, P21, P22) at ``xi`` for an E^3_1 null curve."""
    k = as_fn(k)
    b1, b2, b3 = beta.components[:3]
    d1, d2, d3 = (c.diff() for c in (b1, b2, b3))
    P12 = -2 * (b2 * d2 + (b1 - b3) * (d1 + d3)) * k
    return (P12(xi), (d2 * k)(xi), ((d1 + d3) * k)(xi))


def inverse_e31_data(beta: CurveFn, k=1, xi0: float = 0.0, tol: float = DEFAULT_TOL) -> ReprData31:
    """Generating data reproducing ``beta`` exactly, C fixed at the anchor xi0.

    Changing C translates the curve along a null direction, so C is solved
    from the affine dependence of beta1(xi0) on it.
    """
    if beta.signature is not Signature.E31:
        raise ValueError("inverse_e31_data needs an E31 curve")
    k = as_fn(k)
    b1, b2, b3 = beta.components
    d1, d2, d3 = (c.diff() for c in (b1, b2, b3))
    P12 = -2 * (b2 * d2 + (b1 - b3) * (d1 + d3)) * k
    data = ReprData31(P12, d2 * k, (d1 + d3) * k, xi0, 0.0, tol)
    xi0 = float(xi0)
    if data.P21(xi0) == 0.0:
        raise HypothesisError("P21 = beta2' k vanishes at the anchor xi0 = %r" % xi0)
    target = b1(xi0)
    at0 = forward_e31(data, xi0)[0]
    at1 = forward_e31(data.with_constant(1.0), xi0)[0]
    slope = at1 - at0
    if not math.isfinite(slope) or slope == 0.0:
        raise HypothesisError("integration constant does not move beta1")
    return data.with_constant((target - at0) / slope)


# -- curve evaluators -------------------------------------------------------------

class Repr42Curve:
    """Null curve evaluated through the forward map and its closed-form derivative.

    With ``signature=E31`` the (vanishing) fourth component is dropped.
    """

    def __init__(self, data: ReprData42, signature=Signature.E42):
        self.data = data
        self.signature = Signature.parse(signature)

    def _eval(self, fn, xi):
        p1j, p2j = self.data.jets(xi)
        check_admissible(p2j, xi)
        vals = fn(p1j, p2j)[: self.signature.dim]
        return vals if _is_scalar(xi) else np.moveaxis(vals, 0, -1)

    def position(self, xi):
        return self._eval(beta_from_jets, xi)

    def derivative(self, xi):
        return self._eval(beta_prime_from_jets, xi)


class Repr31Curve:
    """E^3_1 null curve built by quadrature; integrals are cached per xi."""

    signature = Signature.E31

    def __init__(self, data: ReprData31):
        self.data = data
        self._integrals = {}

    def _jets(self, xi: float):
        integral = self._integrals.get(xi)
        if integral is None:
            integral = self._integrals[xi] = p11_integral(self.data, xi)
        return _e31_jets(self.data, xi, integral)

    def _eval(self, fn, xi):
        if _is_scalar(xi):
            return fn(*self._jets(float(xi)))[:3]
        return np.array([fn(*self._jets(float(x)))[:3] for x in np.ravel(xi)]).reshape(
            np.shape(xi) + (3,))

    def position(self, xi):
        return self._eval(beta_from_jets, xi)

    def derivative(self, xi):
        return self._eval(beta_prime_from_jets, xi)

    def fourth_component(self, xi: float) -> float:
        return float(beta_from_jets(*self._jets(float(xi)))[3])


# -- phi identities --------------------------------------------------------------------

def _lemma_terms(x: Row2, y: Row2, n: int, xi):
    if n not in (0, 1):
        raise ValueError("n must be 0 or 1")
    xj, yj = x.jet(xi, 2), y.jet(xi, 2)
    pairs = _pairs(xj, yj)
    sgn = (1.0, 1.0, -1.0, -1.0)
    lhs1 = [s * phi_from_jets(a, b, n) ** 2 for s, (a, b) in zip(sgn, pairs)]
    rhs1 = 4.0 * det2(xj[0], xj[n + 1]) * det2(yj[0], yj[n + 1])
    lhs2 = [s * phi_from_jets(a, b, 1) * phi_from_jets(a, b, 0) for s, (a, b) in zip(sgn, pairs)]
    rhs2 = [
        2.0 * det2(xj[0], xj[2]) * det2(yj[0], yj[1]),
        2.0 * det2(xj[0], xj[1]) * det2(yj[0], yj[2]),
    ]
    return lhs1, [rhs1], lhs2, rhs2


def lemma_residuals(x: Row2, y: Row2, n: int, xi) -> tuple:
    """LHS - RHS of the two phi identities; both vanish identically.

    The first is the signature sum of squared phi_n over the four (E, L)
    pairings; the second is the mixed phi_1 phi_0 identity, independent of n.
    """
    lhs1, rhs1, lhs2, rhs2 = _lemma_terms(x, y, n, xi)
    return sum(lhs1) - sum(rhs1), sum(lhs2) - sum(rhs2)


def lemma_scales(x: Row2, y: Row2, n: int, xi) -> tuple:
    """Sum of absolute values of the terms of each identity (rounding scale)."""
    lhs1, rhs1, lhs2, rhs2 = _lemma_terms(x, y, n, xi)
    return (sum(abs(t) for t in lhs1 + rhs1), sum(abs(t) for t in lhs2 + rhs2))
