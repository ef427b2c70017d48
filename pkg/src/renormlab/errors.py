"""Exception hierarchy shared by all renormlab modules."""


class RenormLabError(Exception):
    """Base class for all package errors."""


# --- analytic maps ---------------------------------------------------------

class OutOfDomain(RenormLabError):
    pass


class UnresolvedMap(RenormLabError):
    pass


class DomainEscape(RenormLabError):
    pass


class DegreeOverflow(RenormLabError):
    pass


class EvenOrderDetected(RenormLabError):
    pass


class NonMonotone(RenormLabError):
    pass


class CriticalCollision(RenormLabError):
    pass


# --- rotation numbers ------------------------------------------------------

class DomainError(RenormLabError):
    pass


class InsufficientDigits(RenormLabError):
    pass


class NotMonotone(NonMonotone):
    pass


class FixedPointOfEta(RenormLabError):
    pass


# --- commuting pairs -------------------------------------------------------

class IterationBudgetExceeded(RenormLabError):
    pass


class NotRenormalizable(RenormLabError):
    pass


class NotEnoughRenormalizations(RenormLabError):
    pass


class CriticalNotAtZero(RenormLabError):
    pass


class ChartFailure(RenormLabError):
    pass


class InsufficientAnalyticity(RenormLabError):
    pass


# --- combinatorics ---------------------------------------------------------

class RationalRotation(RenormLabError):
    pass


class OrbitCollision(RenormLabError):
    pass


class SignatureUnstable(RenormLabError):
    pass


class NotPeriodicRotation(RenormLabError):
    pass


# --- Blaschke family -------------------------------------------------------

class PoleHit(RenormLabError):
    pass


class NotHomeomorphism(RenormLabError):
    pass


class WrongDegree(RenormLabError):
    pass


class NewtonDiverged(RenormLabError):
    pass


class BasinEscape(RenormLabError):
    pass


class SearchFailed(RenormLabError):
    pass


# --- fixed-point lab -------------------------------------------------------

class TypeDrift(RenormLabError):
    pass


class NoConvergence(RenormLabError):
    pass


class StepTooSmall(RenormLabError):
    pass


class EigenFailure(RenormLabError):
    pass


# --- complex bounds --------------------------------------------------------

class DegenerateInterval(RenormLabError):
    pass


class OnSlit(RenormLabError):
    pass


class SampleEscape(RenormLabError):
    pass


class ViolationFound(RenormLabError):
    pass


class CurveSelfIntersection(RenormLabError):
    pass


# --- cli -------------------------------------------------------------------

class ConfigInvalid(RenormLabError):
    pass
