"""Exception types raised across the package."""


class TvCoupleError(Exception):
    """Base class; the CLI maps it to exit status 1."""


class DomainError(TvCoupleError, ValueError):
    pass


class UniverseMismatch(DomainError):
    pass


class EmptyUniverse(DomainError):
    pass


class InvalidCdf(DomainError):
    pass


class GridOverflow(DomainError):
    pass


class TooLarge(DomainError):
    pass


class ShapeError(DomainError):
    pass


class UnknownMember(DomainError, KeyError, NameError):
    pass


class InvalidAssignment(DomainError):
    """An affine-mod rule picked an element outside its subset."""

    def __init__(self, subset, value):
        super().__init__(f"choice {value} not in subset {subset}")
        self.subset = subset
        self.value = value


class ExhaustedStream(TvCoupleError, RuntimeError):
    pass


class SolverStall(TvCoupleError, RuntimeError):
    pass
