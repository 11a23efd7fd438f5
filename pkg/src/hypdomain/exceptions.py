"""Exception hierarchy.

Every error raised deliberately by the package derives from
:class:`HypDomainError`; most also subclass ``ValueError`` or
``RuntimeError`` so generic handlers keep working.
"""


class HypDomainError(Exception):
    """Base class for all package errors."""


# sphere
class DegenerateTriple(HypDomainError, ValueError):
    pass


# domain
class OverlappingComponents(HypDomainError, ValueError):
    pass


class BasepointInComplement(HypDomainError, ValueError):
    pass


class EmptyComponent(HypDomainError, ValueError):
    pass


class NotMultiplyConnected(HypDomainError, ValueError):
    pass


class CurveTouchesComplement(HypDomainError, ValueError):
    pass


class PointNotInDomain(HypDomainError, ValueError):
    pass


# hyperbolic metric
class NonConvergence(HypDomainError, RuntimeError):
    pass


class GridTooCoarse(HypDomainError, ValueError):
    pass


class CurveTooCloseToBoundary(HypDomainError, ValueError):
    pass


# geodesics
class SelfIntersectionDetected(HypDomainError, RuntimeError):
    pass


class ClearanceLost(HypDomainError, RuntimeError):
    pass


class NoSeparatingCurveFound(HypDomainError, RuntimeError):
    pass


class PrincipalMeridianAbsent(HypDomainError, ValueError):
    pass


# canonical maps
class IllConditioned(HypDomainError, RuntimeError):
    pass


class DegenerateComponent(HypDomainError, ValueError):
    pass


class NewtonDiverged(HypDomainError, RuntimeError):
    pass


class WOutsideRange(HypDomainError, ValueError):
    pass


# convergence
class NoHausdorffLimit(HypDomainError, RuntimeError):
    pass


class LabelingInconsistent(HypDomainError, ValueError):
    pass


# harness
class UnknownScenario(HypDomainError, KeyError):
    pass


class IoFailure(HypDomainError, OSError):
    pass
