"""Exception types shared across the package."""


class BeamBVPError(Exception):
    """Base class for all beambvp errors."""


class StructuralError(BeamBVPError):
    """Problem data violates a structural condition (nonnegativity, k > 0)."""


class DomainError(BeamBVPError):
    """An argument lies outside the interval the formula is defined on."""


class NonFiniteError(BeamBVPError):
    """A computation produced NaN or infinity."""


class NoConvergenceError(BeamBVPError):
    """Iteration exhausted its budget without meeting the tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class DivergenceError(BeamBVPError):
    """Iterates grew past the divergence guard."""


class SingularJacobianError(BeamBVPError):
    """Newton's linear system is singular to working precision."""


class ExprError(BeamBVPError):
    """Base class for expression parsing and evaluation errors."""


class ExprSyntaxError(ExprError):
    """Malformed expression text; carries the byte offset of the failure."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ExprError):
    """Identifier is not a variable, constant, or known function."""

    def __init__(self, name, offset):
        super().__init__(f"unknown identifier '{name}' (at offset {offset})")
        self.name = name
        self.offset = offset


class ArityError(ExprError):
    """A function call has the wrong number of arguments."""


class EvalDomainError(ExprError):
    """Evaluation left a function's domain (ln of nonpositive, sqrt of negative, 0^negative)."""


class ConfigError(BeamBVPError):
    """Problem configuration file is invalid; carries the offending key."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
