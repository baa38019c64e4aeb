"""Exception hierarchy shared by every nullforge module."""


class NullforgeError(Exception):
    """Base class for all library errors."""


class ParseError(NullforgeError, ValueError):
    """Malformed expression source.

    ``offset`` is the byte offset into the UTF-8 encoded source and
    ``expected`` the set of tokens that would have been accepted there.
    """

    def __init__(self, message, offset, expected=frozenset()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = message
        if self.expected:
            detail += " (expected one of: %s)" % ", ".join(sorted(self.expected))
        super().__init__("%s at offset %d" % (detail, offset))


class UnknownIdentifierError(ParseError):
    pass


class EvaluationDomainError(NullforgeError, ArithmeticError):
    """An expression produced a non-finite value or hit a division by zero."""


class SignatureError(NullforgeError, ValueError):
    pass


class DegenerateWronskianError(NullforgeError, ArithmeticError):
    """det(p2; p2') is numerically zero, so the representation formula is undefined."""

    def __init__(self, message, xi=None):
        self.xi = xi
        super().__init__(message)


class HypothesisError(NullforgeError, ValueError):
    """Input data violates a standing assumption (P21 zero, constant beta2, k = 0...)."""


class QuadratureError(NullforgeError, ArithmeticError):
    pass


class DegenerateMetricError(NullforgeError, ArithmeticError):
    pass


class ConstraintError(NullforgeError, ValueError):
    """Catalog parameters violate one of the example's stated constraints."""

    def __init__(self, example, predicate):
        self.example = example
        self.predicate = predicate
        super().__init__("%s: constraint %s violated" % (example, predicate))


class ConfigError(NullforgeError, ValueError):
    pass
