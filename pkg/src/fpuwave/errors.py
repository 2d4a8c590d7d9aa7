"""Exception hierarchy shared by the solver modules."""


class WaveError(Exception):
    """Base class for all solver failures."""

    exit_code = 3


class ValidationError(WaveError, ValueError):
    """Input rejected before any numerical work starts."""

    exit_code = 2


class NoRoot(ValidationError):
    pass


class MultipleRoots(ValidationError):
    pass


class GridMismatch(ValidationError):
    pass


class BadDelta(ValidationError):
    pass


class NotCompact(ValidationError):
    pass


class WindowTooShort(ValidationError):
    pass


class DomainTooSmall(ValidationError):
    pass


class StrainInSpinodal(WaveError):
    pass


class ResidualTooLarge(WaveError):
    pass


class AdmissibilityFailure(WaveError):
    pass


class AdmissibilityLost(AdmissibilityFailure):
    pass


class NotContracting(WaveError):
    pass


class Blowup(WaveError):
    pass
