"""Translation surfaces f(xi1, xi2) = gamma1(xi1) + gamma2(xi2) and their checks.

When both generators are null curves the parameters are null coordinates
and f_{xi1 xi2} = 0 by construction, so the surface is minimal timelike
wherever it is immersed.  ``mean_curvature_oracle`` re-derives this from
finite differences of positions only.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np

from .errors import DegenerateMetricError, HypothesisError, SignatureError
from .pseudo_euclid import PEVector, Signature, quadratic_form


class CurveEvaluator(Protocol):
    signature: Signature

    def position(self, xi): ...

    def derivative(self, xi): ...


class FunctionCurve:
    """A curve from a plain callable ``xi -> coordinates``.

    The derivative is a central difference with step ``h``.
    """

    def __init__(self, fn: Callable, signature, h: float = 1e-6):
        self.fn = fn
        self.signature = Signature.parse(signature)
        self.h = h

    def position(self, xi):
        if np.ndim(xi) == 0:
            return np.asarray(self.fn(float(xi)), dtype=float)
        return np.array([self.fn(float(x)) for x in np.ravel(xi)], dtype=float)

    def derivative(self, xi):
        return (self.position(np.add(xi, self.h)) - self.position(np.subtract(xi, self.h))) / (2 * self.h)


@dataclass(frozen=True)
class Grid:
    xi1: np.ndarray
    xi2: np.ndarray

    @classmethod
    def uniform(cls, interval1, n1: int, interval2=None, n2: int | None = None) -> Grid:
        interval2 = interval1 if interval2 is None else interval2
        n2 = n1 if n2 is None else n2
        return cls(np.linspace(*interval1, n1), np.linspace(*interval2, n2))

    @property
    def shape(self):
        return (len(self.xi1), len(self.xi2))


class TranslationSurface:
    def __init__(self, gamma1: CurveEvaluator, gamma2: CurveEvaluator, signature=None):
        sig = Signature.parse(signature or gamma1.signature)
        if gamma1.signature is not sig or gamma2.signature is not sig:
            raise SignatureError("both generators must live in %s" % sig.name)
        self.gamma1 = gamma1
        self.gamma2 = gamma2
        self.signature = sig

    @property
    def dim(self) -> int:
        return self.signature.dim

    def position(self, xi1, xi2) -> np.ndarray:
        return np.asarray(self.gamma1.position(xi1)) + np.asarray(self.gamma2.position(xi2))

    def sample(self, grid: Grid) -> np.ndarray:
        """Positions on the grid, shape (n1, n2, dim)."""
        a = np.asarray(self.gamma1.position(np.asarray(grid.xi1)))
        b = np.asarray(self.gamma2.position(np.asarray(grid.xi2)))
        return a[:, None, :] + b[None, :, :]

    def generators_null(self, grid: Grid, tol: float = 1e-9) -> bool:
        """Sampled check that both generators have null tangents (relative tol)."""
        for curve, xs in ((self.gamma1, grid.xi1), (self.gamma2, grid.xi2)):
            d = np.asarray(curve.derivative(np.asarray(xs)))
            q = np.abs(quadratic_form(d, self.signature))
            if np.any(q > tol * np.maximum(1.0, np.sum(d * d, axis=-1))):
                return False
        return True

    def require_null_generators(self, grid: Grid, tol: float = 1e-9) -> None:
        if not self.generators_null(grid, tol):
            raise HypothesisError("a generator of the surface is not a null curve")


def eval_surface(s: TranslationSurface, xi1: float, xi2: float) -> PEVector:
    return PEVector(tuple(s.position(float(xi1), float(xi2))), s.signature)


@dataclass(frozen=True)
class MinimalityReport:
    passed: bool
    max_residual: float
    worst_point: tuple
    tol: float
    mixed_partial: str = "structural: f_12 = 0 for every translation surface"

    def __str__(self):
        return "minimality %s: max |<f_i, f_i>| = %.3e at %s (tol %.1e)" % (
            "PASS" if self.passed else "FAIL", self.max_residual, self.worst_point, self.tol)


def verify_minimality(s: TranslationSurface, grid: Grid, tol: float = 1e-8) -> MinimalityReport:
    """Largest |<f_xi1, f_xi1>|, |<f_xi2, f_xi2>| over the grid."""
    d1 = np.asarray(s.gamma1.derivative(np.asarray(grid.xi1)))
    d2 = np.asarray(s.gamma2.derivative(np.asarray(grid.xi2)))
    q1 = np.abs(quadratic_form(d1, s.signature))
    q2 = np.abs(quadratic_form(d2, s.signature))
    residual = np.maximum(q1[:, None], q2[None, :])
    i, j = np.unravel_index(int(np.argmax(residual)), residual.shape)
    worst = float(residual[i, j])
    return MinimalityReport(worst <= tol, worst, (float(grid.xi1[i]), float(grid.xi2[j])), tol)


@dataclass(frozen=True)
class PointClassification:
    immersed: np.ndarray
    chen_ok: np.ndarray
    tangent_pairing_ok: np.ndarray


def _minors(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    dim = a.shape[-1]
    return np.stack([
        a[..., i] * b[..., j] - a[..., j] * b[..., i]
        for i in range(dim) for j in range(i + 1, dim)
    ], axis=-1)


def classify_points(s: TranslationSurface, grid: Grid, tol: float = 1e-8) -> PointClassification:
    """Per grid point: immersion, <gamma1, gamma2> != 0 and <gamma1', gamma2'> != 0.

    Every flag is relative to the product of the Euclidean norms involved.
    """
    p1 = np.asarray(s.gamma1.position(np.asarray(grid.xi1)))[:, None, :]
    p2 = np.asarray(s.gamma2.position(np.asarray(grid.xi2)))[None, :, :]
    d1 = np.asarray(s.gamma1.derivative(np.asarray(grid.xi1)))[:, None, :]
    d2 = np.asarray(s.gamma2.derivative(np.asarray(grid.xi2)))[None, :, :]
    d1, d2 = np.broadcast_arrays(d1, d2)
    p1, p2 = np.broadcast_arrays(p1, p2)
    dscale = np.linalg.norm(d1, axis=-1) * np.linalg.norm(d2, axis=-1)
    pscale = np.linalg.norm(p1, axis=-1) * np.linalg.norm(p2, axis=-1)
    minor = np.max(np.abs(_minors(d1, d2)), axis=-1)
    return PointClassification(
        immersed=minor > tol * dscale,
        chen_ok=np.abs(quadratic_form(p1, s.signature, p2)) > tol * pscale,
        tangent_pairing_ok=np.abs(quadratic_form(d1, s.signature, d2)) > tol * dscale,
    )


_D1 = ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12))
_D2 = ((-2, -1 / 12), (-1, 16 / 12), (0, -30 / 12), (1, 16 / 12), (2, -1 / 12))


def mean_curvature_oracle(s: TranslationSurface, xi1: float, xi2: float,
                          h: float = 1e-4, gate: float = 1e-8) -> float:
    """Euclidean norm of the mean curvature vector, from finite differences.

    Only surface positions are sampled, on a five-point (fourth-order)
    stencil in each direction; the mixed derivative uses the tensor product
    of the first-derivative stencil.  The induced metric may be indefinite;
    the point is rejected when sqrt|det g| <= gate |f_1| |f_2|, which in null
    coordinates is |<f_1, f_2>| <= gate |f_1| |f_2|.

    Raises:
        DegenerateMetricError: the metric fails the gate.
    """
    a, b = float(xi1), float(xi2)
    cache = {}

    def f(i, j):
        if (i, j) not in cache:
            cache[i, j] = np.asarray(s.position(a + i * h, b + j * h), dtype=float)
        return cache[i, j]

    f1 = sum(w * f(i, 0) for i, w in _D1) / h
    f2 = sum(w * f(0, j) for j, w in _D1) / h
    f11 = sum(w * f(i, 0) for i, w in _D2) / h ** 2
    f22 = sum(w * f(0, j) for j, w in _D2) / h ** 2
    f12 = sum(wi * wj * f(i, j) for i, wi in _D1 for j, wj in _D1) / h ** 2

    ip = lambda u, v: float(quadratic_form(u, s.signature, v))  # noqa: E731
    g = np.array([[ip(f1, f1), ip(f1, f2)], [ip(f2, f1), ip(f2, f2)]])
    det = np.linalg.det(g)
    if np.sqrt(abs(det)) <= gate * np.linalg.norm(f1) * np.linalg.norm(f2):
        raise DegenerateMetricError("induced metric degenerate at (%g, %g)" % (a, b))
    ginv = np.linalg.inv(g)
    laplace = ginv[0, 0] * f11 + 2 * ginv[0, 1] * f12 + ginv[1, 1] * f22
    frame = (f1, f2)
    tangential = sum(
        ginv[i, j] * ip(laplace, frame[j]) * frame[i] for i in range(2) for j in range(2))
    return float(np.linalg.norm(0.5 * (laplace - tangential)))
