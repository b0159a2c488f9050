"""
Radial Yamabe exception hierarchy

Every error raised by the numerics derives from YamabeError. Argument-domain
errors also derive from ValueError so that pydantic validators report them as
field diagnostics.
"""

from typing import Any, Dict, Optional


class YamabeError(Exception):
    """Base class of all project errors"""
    pass


class DomainError(YamabeError, ValueError):
    """Argument lies outside the mathematical domain of an operation"""
    pass


class RangeError(DomainError):
    """Radius outside [r_min, r_max]"""
    pass


class GeometryError(DomainError):
    """Invalid model manifold, or an operation needs the center r=0"""
    pass


class DivergentIntegralError(DomainError):
    """Aubin integral outside its convergent regime"""
    pass


class UnsupportedDimensionError(DomainError):
    """Dimension not covered by the requested analysis"""
    pass


class ProblemValidationError(YamabeError, ValueError):
    """Coefficient positivity, mesh or shape check failed"""
    pass


class ContractViolation(YamabeError):
    """Caller broke a documented precondition"""
    pass


class IndefiniteFormError(YamabeError):
    """Bilinear form is not positive definite on interior dofs"""
    pass


class CoercivityError(IndefiniteFormError):
    """Operator -div(a grad) + b is not coercive"""
    pass


class ConvergenceError(YamabeError):
    """Iterative method stopped before reaching its tolerance"""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class StepSizeError(ConvergenceError):
    """Backtracking line search could not find an acceptable step"""
    pass


class BracketError(YamabeError):
    """Root bracket not found below the growth cap"""
    pass


class MultiplierError(YamabeError):
    """Lagrange multiplier denominator is not positive"""
    pass


class AccuracyError(YamabeError):
    """Quadrature failed its self-convergence check"""
    pass


class FitError(YamabeError):
    """Least-squares fit is ill-conditioned"""

    def __init__(self, message: str, condition_number: float = float("nan")):
        super().__init__(message)
        self.condition_number = condition_number


class ConfigError(YamabeError):
    """Malformed run configuration"""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        location = []
        if field:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}")
        suffix = f" ({', '.join(location)})" if location else ""
        super().__init__(f"{message}{suffix}")
        self.reason = message
        self.field = field
        self.line = line
