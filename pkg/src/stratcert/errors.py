"""Exception types shared across the toolkit."""


class StratcertError(Exception):
    """Base class for all toolkit-specific errors."""


class DomainViolation(StratcertError):
    """An input function violates a sign or positivity hypothesis at a point."""


class NonSmoothPoint(StratcertError):
    """Evaluation requested at a point where a fractional power is singular."""


class SignViolation(StratcertError):
    """A required strict sign condition (e.g. concavity along a field) fails."""


class SmoothnessViolation(StratcertError):
    """A second-order operator was applied to a field declared C1 only."""


class NonFiniteEvaluation(StratcertError):
    """A pointwise evaluation produced NaN or infinity."""


class EmptySample(StratcertError):
    """Every sample point was excluded by the guards."""


class DegenerateDomain(StratcertError):
    """The integration domain has (numerically) no admissible volume."""


class UnsupportedExcision(StratcertError):
    """The excision geometry cannot be represented by this quadrature method."""


class ZeroDenominator(StratcertError):
    """A quotient-form bound has a denominator indistinguishable from zero."""


class AlphaOutOfRange(StratcertError):
    """An auxiliary exponent lies outside the admissible window."""


class UnsupportedProbe(StratcertError):
    """The requested verifier has no extremizer-like probe family."""


class ConfigError(StratcertError):
    """A suite configuration failed to parse or validate."""
