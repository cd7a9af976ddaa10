"""Exception hierarchy shared by all ncpii modules."""


class NCPIIError(Exception):
    """Base class for every error raised by this package."""


class SpecialFunctionRangeError(NCPIIError, OverflowError):
    """Argument outside the evaluation domain of a special function."""

    def __init__(self, message, argument=None):
        super().__init__(message)
        self.argument = argument


class PoleError(NCPIIError, ZeroDivisionError):
    """Evaluation at a pole (Gamma function, jump coefficients)."""


class StructureError(NCPIIError, ValueError):
    """Coupling matrix has no permutation-matrix support."""


class BoundError(StructureError):
    """A diagonal entry of the coupling has modulus larger than one."""


class InvolutionError(StructureError):
    """The coupling squared is not diagonal."""


class RegimeError(NCPIIError, ValueError):
    """Formula requested outside the regime where it applies."""


class BranchError(NCPIIError, ValueError):
    """Argument lies on a logarithmic branch cut."""


class DomainError(NCPIIError, ValueError):
    """Argument outside the domain of an asymptotic formula or trajectory."""


class BoundaryError(NCPIIError, ValueError):
    """Airy boundary data is not accurate enough at the requested start point."""

    def __init__(self, message, achievable=None):
        super().__init__(message)
        self.achievable = achievable


class StiffnessError(NCPIIError, ArithmeticError):
    """Step size underflow during adaptive integration."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class ContourError(NCPIIError, ValueError):
    """Parametrix evaluated exactly on a jump contour."""


class ConfigError(NCPIIError, ValueError):
    """Malformed run configuration; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
