"""Function-valued rows, the E/L sign maps, the phi pairing and Wronskians.

Numerical work happens on *jets*: arrays of shape ``(order + 1, 2, ...)``
holding a row and its derivatives at one or many parameter values, so the
same formulas serve symbolic rows and rows whose entries come from
quadrature.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .expr_dsl import ScalarFn, as_fn, derivative


class MatrixTag(enum.Enum):
    E = "E"  # diag(1, -1)
    L = "L"  # [[0, 1], [1, 0]]


@dataclass(frozen=True)
class Row2:
    c1: ScalarFn
    c2: ScalarFn

    def __post_init__(self):
        object.__setattr__(self, "c1", as_fn(self.c1))
        object.__setattr__(self, "c2", as_fn(self.c2))

    def diff(self) -> Row2:
        return Row2(self.c1.diff(), self.c2.diff())

    def scaled(self, k) -> Row2:
        k = as_fn(k)
        return Row2(k * self.c1, k * self.c2)

    def jet(self, xi, order: int = 2) -> np.ndarray:
        """Values of the row and its first ``order`` derivatives at ``xi``."""
        return np.array([
            [derivative(self.c1, n)(xi), derivative(self.c2, n)(xi)]
            for n in range(order + 1)
        ])

    def __str__(self):
        return "(%s, %s)" % (self.c1, self.c2)


def apply_signature(r: Row2, tag) -> Row2:
    """Right multiplication ``r E`` or ``r L``."""
    tag = MatrixTag(tag)
    if tag is MatrixTag.E:
        return Row2(r.c1, -r.c2)
    return Row2(r.c2, r.c1)


def sign_jet(jet: np.ndarray, tag) -> np.ndarray:
    tag = MatrixTag(tag)
    if tag is MatrixTag.E:
        out = jet.copy()
        out[:, 1] = -out[:, 1]
        return out
    return jet[:, ::-1].copy()


def det2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def phi_from_jets(xj: np.ndarray, yj: np.ndarray, n: int = 0):
    """-det(x; y^(n+1)) + det(x^(n+1); y) from jets of order >= n + 1."""
    if n not in (0, 1):
        raise ValueError("n must be 0 or 1")
    return -det2(xj[0], yj[n + 1]) + det2(xj[n + 1], yj[0])


def wronskian_from_jet(pj: np.ndarray, order: int = 1):
    return det2(pj[0], pj[order])


def phi_n(x: Row2, y: Row2, n: int, xi):
    """phi (n=0) or its derivative (n=1), evaluated at ``xi``."""
    return phi_from_jets(x.jet(xi, n + 1), y.jet(xi, n + 1), n)


def wronskian(p: Row2, order: int, xi):
    """det of the rows p(xi) and p^(order)(xi)."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    return wronskian_from_jet(p.jet(xi, order), order)


def phi_expr(x: Row2, y: Row2) -> ScalarFn:
    dx, dy = x.diff(), y.diff()
    return -(x.c1 * dy.c2 - x.c2 * dy.c1) + (dx.c1 * y.c2 - dx.c2 * y.c1)


def wronskian_expr(p: Row2, order: int = 1) -> ScalarFn:
    q = p
    for _ in range(order):
        q = q.diff()
    return p.c1 * q.c2 - p.c2 * q.c1
