"""Exception hierarchy. ConfigError maps to CLI exit 2, everything else to exit 1."""

from typing import Any, Optional


class EntrosteerError(Exception):
    """Base class; `details` holds the quantities that explain the failure."""

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.details = details


class ConfigError(EntrosteerError):
    pass


class ComputationError(EntrosteerError):
    pass


# ─── quantum-core ─────────────────────────────────────────────────────────────

class InvalidDensity(ComputationError):
    def __init__(self, message: str, magnitude: float):
        super().__init__(message, magnitude=magnitude)
        self.magnitude = magnitude


class NotHermitian(InvalidDensity):
    pass


class TraceNotOne(InvalidDensity):
    pass


class NotPositive(InvalidDensity):
    pass


class DimensionMismatch(ComputationError):
    pass


class NotUnitary(ComputationError):
    def __init__(self, message: str, deviation: float):
        super().__init__(message, deviation=deviation)
        self.deviation = deviation


# ─── entropy ──────────────────────────────────────────────────────────────────

class DomainError(ComputationError):
    pass


class InvalidDistribution(ComputationError):
    pass


class InfiniteDivergence(ComputationError):
    """Support condition q_i = 0 ⇒ p_i = 0 fails; the divergence is +∞."""

    def __init__(self, message: str, offending: list[int]):
        super().__init__(message, offending=offending)
        self.offending = offending


class MarginalMismatch(ComputationError):
    def __init__(self, message: str, deviation: float):
        super().__init__(message, deviation=deviation)
        self.deviation = deviation


# ─── measurements / states ────────────────────────────────────────────────────

class NotPrime(ComputationError):
    pass


class OutOfRange(ComputationError):
    def __init__(self, message: str, name: str = "", value: Optional[float] = None):
        super().__init__(message, name=name, value=value)
        self.name = name
        self.value = value


# ─── eur-bounds ───────────────────────────────────────────────────────────────

class UnsupportedCombination(ComputationError):
    pass


class BudgetExceeded(ComputationError):
    """Minimiser ran out of iterations; `best` carries the best value found so far."""

    def __init__(self, message: str, best: Any):
        super().__init__(message, best=best)
        self.best = best


# ─── criteria / solvers ───────────────────────────────────────────────────────

class SingularMarginal(ComputationError):
    pass


class InvalidPermutationMatrix(ComputationError):
    pass


class NonMonotone(ComputationError):
    def __init__(self, message: str, verdicts: list[bool]):
        super().__init__(message, verdicts=verdicts)
        self.verdicts = verdicts


class NoViolation(ComputationError):
    pass
