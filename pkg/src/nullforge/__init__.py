"""Null curves in E^4_2 and E^3_1 from four scalar functions, without integration,
and minimal timelike translation surfaces built from them."""

__version__ = "0.1.0"

from .catalog import Example, ExampleSpec, build_example, example_names
from .errors import (
    ConfigError, ConstraintError, DegenerateMetricError, DegenerateWronskianError,
    EvaluationDomainError, HypothesisError, NullforgeError, ParseError, QuadratureError,
    SignatureError, UnknownIdentifierError,
)
from .expr_dsl import ScalarFn, X, derivative, differentiate, evaluate, parse, simplify
from .null_repr import (
    CurveFn, Repr31Curve, Repr42Curve, ReprData31, ReprData42, forward_e31, forward_e42,
    curve_derivative_e31, curve_derivative_e42, inverse_e31, inverse_e31_data, inverse_e42,
    inverse_e42_data, lemma_residuals,
)
from .phi_core import MatrixTag, Row2, apply_signature, phi_n, wronskian
from .pseudo_euclid import PEVector, Signature, inner_product, is_null
from .quadrature import QuadResult, integrate_adaptive
from .surfaces import (
    Grid, TranslationSurface, classify_points, eval_surface, mean_curvature_oracle,
    verify_minimality,
)
