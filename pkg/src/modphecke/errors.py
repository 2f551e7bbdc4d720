"""Exception types raised by the toolkit."""


class ModpheckeError(Exception):
    pass


class NotPrime(ModpheckeError, ValueError):
    pass


class TooLarge(ModpheckeError, ValueError):
    pass


class DivisionByZero(ModpheckeError, ZeroDivisionError):
    pass


class OutOfRange(ModpheckeError, ValueError):
    pass


class Singular(ModpheckeError, ValueError):
    pass


class SideMismatch(ModpheckeError, ValueError):
    pass


class AlgebraMismatch(ModpheckeError, ValueError):
    pass


class NotAComplex(ModpheckeError):
    pass


class StructureMismatch(ModpheckeError):
    """Two independent computations of the same structure constants disagree."""


class IdempotentCheckFailed(ModpheckeError):
    pass


class RelationFailure(ModpheckeError):
    pass


class IdentityFailure(ModpheckeError):
    pass


class CriterionMismatch(ModpheckeError):
    pass


class FreenessFailure(ModpheckeError):
    pass


class NotIso(ModpheckeError):
    pass


class AdjunctionFailure(ModpheckeError):
    pass


class TruncationOverflow(ModpheckeError):
    pass


class NotAFace(ModpheckeError, ValueError):
    pass


class NotClassifiable(ModpheckeError):
    pass
