"""Named example curves and surfaces, each with generating data and closed form.

Every entry carries both routes to the same object: the representation
formula applied to its generating functions, and the explicit closed-form
parametrization.  They must agree pointwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, ConstraintError
from .expr_dsl import X, as_fn, cos, exp, sin
from .null_repr import CurveFn, Repr31Curve, Repr42Curve, ReprData31, ReprData42
from .pseudo_euclid import Signature
from .surfaces import Grid, TranslationSurface


@dataclass(frozen=True)
class ExampleSpec:
    name: str
    params: dict = field(default_factory=dict)


@dataclass
class Example:
    spec: ExampleSpec
    kind: str
    signature: Signature
    interval: tuple
    data: object = None
    closed_form: CurveFn | None = None
    curve: object = None
    surface: TranslationSurface | None = None
    closed_surface: TranslationSurface | None = None
    extras: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def evaluator(self):
        """Representation-based evaluator: a curve or a surface."""
        return self.curve if self.kind == "curve" else self.surface

    def closed_form_error(self, samples: int = 20) -> float:
        """Max |representation - closed form| over the default sampling."""
        a, b = self.interval
        if self.kind == "curve":
            xs = np.linspace(a, b, samples)
            return float(np.max(np.abs(self.curve.position(xs) - self.closed_form.position(xs))))
        grid = Grid.uniform(self.interval, samples)
        return float(np.max(np.abs(self.surface.sample(grid) - self.closed_surface.sample(grid))))


@dataclass(frozen=True)
class _Entry:
    kind: str
    defaults: dict
    constraints: tuple
    build: Callable
    description: str


def _exp_interval(*rates) -> tuple:
    return (-1.0, 1.0) if max(abs(r) for r in rates) <= 3 else (-0.5, 0.5)


def _alpha1(spec, p, q, r, s):
    c = 1.0 / (4.0 * (s - r))
    e = lambda rate: exp(rate * X)  # noqa: E731
    closed = CurveFn.of([
        c * ((p - s) * e(p - r) + (r - q) * e(q - s)),
        c * ((p - r) * e(p - s) + (q - s) * e(q - r)),
        c * ((p - s) * e(p - r) - (r - q) * e(q - s)),
        c * ((p - r) * e(p - s) - (q - s) * e(q - r)),
    ])
    data = ReprData42.from_functions(e(p), e(q), e(r), e(s))
    return Example(spec, "curve", Signature.E42, _exp_interval(p, q, r, s, p - r, q - r),
                   data, closed, Repr42Curve(data))


def _alpha2(spec, p, q):
    c = 1.0 / (4.0 * q)
    closed = CurveFn.of([
        c * -(p + q) * cos((p - q) * X),
        c * -(p + q) * sin((p - q) * X),
        c * (p - q) * cos((p + q) * X),
        c * -(p - q) * sin((p + q) * X),
    ])
    data = ReprData42.from_functions(cos(p * X), sin(p * X), cos(q * X), sin(q * X))
    return Example(spec, "curve", Signature.E42, (-1.0, 1.0), data, closed, Repr42Curve(data))


def _alpha3(spec, q, r, s, closed=None):
    data = ReprData31(exp(q * X), exp(r * X), exp(s * X), xi0=0.0, C=0.0)
    a = (q - s) * (q - r) / ((q + s - 2 * r) * (s - r))
    b = (q - s) / (q + s - 2 * r)
    c = (r - q) / (s - r)
    if closed is None:
        closed = CurveFn.of([
            0.25 * (a * exp((q + s - 2 * r) * X) + b + c * exp((q - s) * X)),
            0.25 * (2 * (q - s) / (s - r) * exp((q - r) * X)),
            0.25 * (a * exp((q + s - 2 * r) * X) + b - c * exp((q - s) * X)),
        ])
    p11 = b * exp((q + s - r) * X) - b * exp(r * X)
    return Example(spec, "curve", Signature.E31, _exp_interval(q + s - 2 * r, q - r, q - s),
                   data, closed, Repr31Curve(data), extras={"P11": p11})


def _alpha4(spec):
    closed = CurveFn.of([
        "-1.5*exp(x) + 0.75 + 0.5*exp(3*x)",
        "-1.5*exp(2*x)",
        "-1.5*exp(x) + 0.75 - 0.5*exp(3*x)",
    ])
    return _alpha3(spec, 4.0, 2.0, 1.0, closed)


def _alpha4_tilde(spec):
    # (q, r, s) = (2, 0, 1); any q with r = q - 2, s = q - 1 gives this curve
    closed = CurveFn.of([
        "exp(3*x)/6 + 1/12 - 0.5*exp(x)",
        "0.5*exp(2*x)",
        "exp(3*x)/6 + 1/12 + 0.5*exp(x)",
    ])
    return _alpha3(spec, 2.0, 0.0, 1.0, closed)


ALPHA5 = ("-1 + 1.5*cos(x) - cos(x)^3", "-sin(x)^3", "1.5*cos(x) - 1")
ALPHA5_TILDE = ("sin(x)^3", "-1 + 1.5*cos(x) - cos(x)^3", "1.5*cos(x) - 1")

# Standard-mode inverse data of ALPHA5_TILDE with k = 1/sin(x), simplified by
# hand; det(p2; p2') = 4.5 (1 - sin 2x) so the data are valid on (-3pi/4, pi/4).
ALPHA5_TILDE_DATA = (
    "-2*((sin(x)^3 + 1.5*cos(x) - 1)*1.5*cos(2*x)"
    " - (-1 + 1.5*cos(x) - cos(x)^3)*1.5*(sin(2*x) - 1))",
    "-2*((-1 + 1.5*cos(x) - cos(x)^3)*1.5*cos(2*x)"
    " + (sin(x)^3 - 1.5*cos(x) + 1)*1.5*(sin(2*x) - 1))",
    "1.5*cos(2*x)",
    "1.5*(sin(2*x) - 1)",
)


def _alpha5(spec):
    data = ReprData31("sin(2*x)", "cos(x)", "sin(x)", xi0=0.0, C=0.0)
    return Example(spec, "curve", Signature.E31, (-1.0, 1.0), data, CurveFn.of(ALPHA5),
                   Repr31Curve(data), extras={"P11": as_fn("-2*(cos(x) - 1)^2")})


def _alpha5_tilde(spec):
    data = ReprData42.from_functions(*ALPHA5_TILDE_DATA)
    return Example(spec, "curve", Signature.E31, (-1.0, 0.7), data, CurveFn.of(ALPHA5_TILDE),
                   Repr42Curve(data, Signature.E31),
                   extras={"valid_interval": (-3 * math.pi / 4, math.pi / 4)})


def _surface(spec, first, second, gamma2_closed=False):
    g1, g2 = build_example(first), build_example(second)
    gamma2 = g2.closed_form if gamma2_closed else g2.curve
    return Example(
        spec, "surface", Signature.E31, (-1.0, 1.0),
        data=(g1.data, g2.data),
        surface=TranslationSurface(g1.curve, gamma2),
        closed_surface=TranslationSurface(g1.closed_form, g2.closed_form),
        extras={"generators": (g1, g2)},
    )


def _f4(spec):
    return _surface(spec, "alpha4", "alpha4_tilde")


def _f5(spec):
    # alpha5_tilde's generating data degenerate at pi/4, inside [-1, 1]
    return _surface(spec, "alpha5", "alpha5_tilde", gamma2_closed=True)


CATALOG = {
    "alpha1": _Entry("curve", {"p": 2.0, "q": 1.0, "r": 1.0, "s": 0.0},
                     (("r != s", lambda P: P["r"] != P["s"]),), _alpha1,
                     "E42 null curve from exponentials exp(p x), exp(q x), exp(r x), exp(s x)"),
    "alpha2": _Entry("curve", {"p": 2.0, "q": 1.0},
                     (("q != 0", lambda P: P["q"] != 0),), _alpha2,
                     "E42 null curve from cos(p x), sin(p x), cos(q x), sin(q x)"),
    "alpha3": _Entry("curve", {"q": 4.0, "r": 2.0, "s": 1.0},
                     (("r != s", lambda P: P["r"] != P["s"]),
                      ("q + s - 2r != 0", lambda P: P["q"] + P["s"] - 2 * P["r"] != 0)),
                     _alpha3, "E31 null curve from exp(q x), exp(r x), exp(s x), P11 by quadrature"),
    "alpha4": _Entry("curve", {}, (), _alpha4, "alpha3 with q=4, r=2, s=1"),
    "alpha4_tilde": _Entry("curve", {}, (), _alpha4_tilde, "alpha3 with q=2, r=0, s=1"),
    "alpha5": _Entry("curve", {}, (), _alpha5, "E31 null curve from sin(2x), cos(x), sin(x)"),
    "alpha5_tilde": _Entry("curve", {}, (), _alpha5_tilde,
                           "alpha5 rotated in the (1,2)-plane; E42 data valid on (-3pi/4, pi/4)"),
    "f4": _Entry("surface", {}, (), _f4, "minimal timelike surface alpha4(xi1) + alpha4_tilde(xi2)"),
    "f5": _Entry("surface", {}, (), _f5, "minimal timelike surface alpha5(xi1) + alpha5_tilde(xi2)"),
}


def example_names() -> list:
    return list(CATALOG)


def build_example(spec, **params) -> Example:
    """Build a catalog example from an ExampleSpec or a name plus parameters.

    Raises:
        ConfigError: unknown example or parameter name.
        ConstraintError: parameters violate a stated constraint.
    """
    if isinstance(spec, str):
        spec = ExampleSpec(spec, dict(params))
    entry = CATALOG.get(spec.name)
    if entry is None:
        raise ConfigError("unknown example %r (choose from %s)" % (spec.name, ", ".join(CATALOG)))
    unknown = set(spec.params) - set(entry.defaults)
    if unknown:
        raise ConfigError("%s does not take parameter(s) %s" % (spec.name, ", ".join(sorted(unknown))))
    values = {k: float(v) for k, v in {**entry.defaults, **spec.params}.items()}
    for label, ok in entry.constraints:
        if not ok(values):
            raise ConstraintError(spec.name, label)
    spec = ExampleSpec(spec.name, values)
    return entry.build(spec, **values)
