"""Adaptive Simpson quadrature with a Richardson-corrected error estimate."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import QuadratureError

DEFAULT_TOL = 1e-10
MAX_DEPTH = 40


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    evaluations: int


def integrate_adaptive(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    max_depth: int = MAX_DEPTH,
    max_evaluations: int = 2_000_000,
) -> QuadResult:
    """Integrate ``f`` over [a, b] to absolute accuracy ``tol``.

    Each panel is accepted once the two-half Simpson estimate differs from
    the whole-panel one by at most 15x its share of the tolerance; the
    accepted value carries the Richardson correction ``(S2 - S1) / 15``.
    Swapping the endpoints negates the result.

    Raises:
        QuadratureError: a panel still fails the test at ``max_depth``
            (suspected singularity or a tolerance below rounding level).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a == b:
        return QuadResult(0.0, 0.0, 0)
    if a > b:
        r = integrate_adaptive(f, b, a, tol, max_depth, max_evaluations)
        return QuadResult(-r.value, r.error_estimate, r.evaluations)

    count = 0

    def call(x):
        nonlocal count
        count += 1
        if count > max_evaluations:
            raise QuadratureError("more than %d integrand evaluations" % max_evaluations)
        return f(x)

    fa, fb = call(a), call(b)
    m = 0.5 * (a + b)
    fm = call(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    # explicit stack keeps deep refinement off the Python call stack
    value = 0.0
    error = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s_whole, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = call(lm), call(rm)
        h = hi - lo
        left = h / 12.0 * (flo + 4.0 * flm + fmid)
        right = h / 12.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - s_whole
        if abs(delta) <= 15.0 * eps:
            value += left + right + delta / 15.0
            error += abs(delta) / 15.0
            continue
        if depth + 1 >= max_depth:
            raise QuadratureError(
                "max subdivision depth %d exceeded near [%g, %g]" % (max_depth, lo, hi))
        stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
        stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
    return QuadResult(value, error, count)
