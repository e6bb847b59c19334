"""Exception and warning classes."""


class MixedFSError(Exception):
    """Base class for all errors raised by the package."""


class ShapeError(MixedFSError, ValueError):
    pass


class NonHermitianInput(MixedFSError, ValueError):
    pass


class DomainError(MixedFSError, ValueError):
    """A matrix function was applied outside its scalar domain."""

    def __init__(self, eigenvalue, func, message=None):
        self.eigenvalue = eigenvalue
        self.func = func
        name = getattr(func, "name", None) or getattr(func, "__name__", repr(func))
        super().__init__(message or f"eigenvalue {eigenvalue!r} outside the domain of {name}")


class NotADensityMatrix(MixedFSError, ValueError):
    pass


class NonUnitaryGauge(MixedFSError, ValueError):
    pass


class NonUnitState(MixedFSError, ValueError):
    pass


class BadRank(MixedFSError, ValueError):
    pass


class SimplexViolation(MixedFSError, ValueError):
    pass


class NotTracePreserving(MixedFSError, ValueError):
    pass


class TooManyKraus(MixedFSError, ValueError):
    pass


class SingularState(MixedFSError, ValueError):
    pass


class NormDrift(MixedFSError, ValueError):
    pass


class BadFamily(MixedFSError, ValueError):
    pass


class SizeLimit(MixedFSError, ValueError):
    pass


class ConvergenceError(MixedFSError, RuntimeError):
    pass


class RankDeficiencyWarning(UserWarning):
    """Eigenmode pairs outside the support of rho carried a nonzero derivative."""

    def __init__(self, pairs):
        self.pairs = list(pairs)
        super().__init__(f"{len(self.pairs)} excluded mode pair(s) with nonzero derivative: {self.pairs[:6]}")


class DegenerateSampleWarning(UserWarning):
    pass
