"""Exception types raised across the package."""


class DevCorrError(Exception):
    pass


class InvalidDeviationMatrix(DevCorrError, ValueError):
    """A matrix fails the deviation-matrix invariants."""


class NotHermitian(InvalidDeviationMatrix):
    pass


class TraceViolation(InvalidDeviationMatrix):
    pass


class NonPhysicalState(DevCorrError, ValueError):
    """Density matrix with negative eigenvalues or non-unit trace."""


class OptimizerFailure(DevCorrError, RuntimeError):
    pass


class NegativeTime(DevCorrError, ValueError):
    pass


class ZeroRate(DevCorrError, ZeroDivisionError):
    pass


class EmptySeries(DevCorrError, ValueError):
    pass


class FitDivergence(DevCorrError, RuntimeError):
    pass


class DegenerateSignal(FitDivergence):
    """Signal indistinguishable from its offset; the decay rate is unidentifiable."""


class InconsistentFits(DevCorrError, RuntimeError):
    pass


class InconsistentFitsWarning(UserWarning):
    pass
