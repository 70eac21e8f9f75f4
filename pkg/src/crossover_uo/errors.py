"""Exception types raised across the package."""


class CrossoverError(Exception):
    """Base class for all package errors."""


class NotSymmetric(CrossoverError, ValueError):
    pass


class NotNnd(CrossoverError, ValueError):
    pass


class MalformedFile(CrossoverError, ValueError):
    pass


class LabelGap(CrossoverError, ValueError):
    pass


class EmptyDesign(CrossoverError, ValueError):
    pass


class NotMultiple(CrossoverError, ValueError):
    """Subject count is not a multiple of the treatment count."""


class TooLarge(CrossoverError, ValueError):
    """An enumeration or brute-force average would exceed its cap."""


class TooSmall(CrossoverError, ValueError):
    pass


class ExcludedCase(CrossoverError, ValueError):
    """p = v = 2, where neither effect set is estimable."""


class BadShape(CrossoverError, ValueError):
    pass


class BadParams(CrossoverError, ValueError):
    pass


class SizeMismatch(CrossoverError, ValueError):
    pass


class NotInClassD(CrossoverError, ValueError):
    pass


class NotConnected(CrossoverError, ValueError):
    pass


class PreconditionViolated(CrossoverError, ValueError):
    pass


class RowSumViolation(CrossoverError, ValueError):
    pass


class NonpositiveDenominator(CrossoverError, ValueError):
    pass


class DegenerateParams(CrossoverError, ValueError):
    pass
