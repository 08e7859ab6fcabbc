"""Exception hierarchy shared by every package of the toolkit."""


class InterferometryError(Exception):
    """Base class for all toolkit errors."""


class BasisMismatchError(InterferometryError, ValueError):
    pass


class DimensionMismatchError(InterferometryError, ValueError):
    pass


class NotOrthogonalError(InterferometryError, ValueError):
    pass


class CoefficientsNotNormalizedError(InterferometryError, ValueError):
    pass


class InvalidStateError(InterferometryError, ValueError):
    """Amplitudes are not finite, not normed, or do not match the basis."""


class InvalidOperatorError(InterferometryError, ValueError):
    pass


class InvalidEffectError(InterferometryError, ValueError):
    """Operator is not hermitian or its spectrum leaves [0, 1]."""


class NotPositiveError(InvalidEffectError):
    """Operator has an eigenvalue below -tol.pos."""


class ExpectationOutOfRangeError(InterferometryError, ValueError):
    pass


class InvalidElementError(InterferometryError, ValueError):
    pass


class InvalidPathPairError(InvalidElementError):
    pass


class ZeroSurvivalError(InterferometryError, ValueError):
    """All amplitude was absorbed, so no conditional state exists."""


class NoSweptPhaseError(InterferometryError, ValueError):
    pass


class AmbiguousSweptPhaseError(InterferometryError, ValueError):
    pass


class LayoutMismatchError(InterferometryError, ValueError):
    pass


class IncompleteFamilyError(InterferometryError, ValueError):
    pass


class MissingOutcomeError(InterferometryError, KeyError):
    pass


class DegenerateDistributionError(InterferometryError, ValueError):
    pass


class UnknownScenarioError(InterferometryError, KeyError):
    pass


class InvalidParamsError(InterferometryError, ValueError):
    pass


class ConfigError(InterferometryError, ValueError):
    pass
