"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the CLI prints as
``error[<code>]: <message>``.
"""


class TitchmarshError(Exception):
    code = "error"


class ConfigError(TitchmarshError, ValueError):
    code = "config"


class ParameterError(TitchmarshError, ValueError):
    code = "parameter"


class DomainError(TitchmarshError, ValueError):
    code = "domain"


class DegenerateModulusError(TitchmarshError, ValueError):
    code = "degenerate-modulus"


class InvalidPromotionError(TitchmarshError, ValueError):
    code = "invalid-promotion"


class InvalidExtensionError(TitchmarshError, ValueError):
    code = "invalid-extension"


class NonConvergenceError(TitchmarshError, ArithmeticError):
    """Raised when an extrapolated limit does not settle.

    ``partial`` holds whatever was computed before giving up.
    """

    code = "nonconvergence"

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class QuadratureError(TitchmarshError, ArithmeticError):
    code = "quadrature"


class DivergenceError(TitchmarshError, ArithmeticError):
    code = "divergence"


class DecayError(TitchmarshError, ArithmeticError):
    code = "decay"


class TruncationError(TitchmarshError, ArithmeticError):
    code = "truncation"


class InapplicableError(TitchmarshError, ValueError):
    code = "inapplicable"


class UnsupportedDimensionError(TitchmarshError, ValueError):
    code = "unsupported-dimension"


class FitError(TitchmarshError, ValueError):
    code = "fit"
