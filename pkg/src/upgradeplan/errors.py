"""Exception types raised by the package."""


class UpgradePlanError(Exception):
    """Base class for all package errors."""

    code = "E_GENERIC"


class DomainError(UpgradePlanError, ValueError):
    """An age or parameter lies outside the domain where it is defined."""

    code = "E_DOMAIN"


class QuadratureError(UpgradePlanError, ArithmeticError):
    """Adaptive quadrature did not converge within its depth cap."""

    code = "E_QUADRATURE"


class TechnicalRequirementError(UpgradePlanError):
    """The located inflection point fails the tangent-dominance check."""

    code = "E_INFLECTION"


class InstanceError(UpgradePlanError, ValueError):
    """An instance violates one of its invariants.

    ``field`` names the offending instance field (dotted path for nested
    entries), so callers can point the user at the right spot.
    """

    code = "E_SEMANTIC"

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class InstanceSyntaxError(UpgradePlanError, ValueError):
    """An instance document is not well-formed; ``line`` and ``column`` locate the problem."""

    code = "E_SYNTAX"

    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
