"""Exception hierarchy.

Every error raised by the library derives from :class:`MMError`, which is a
``ValueError``. Input that does not describe a well-formed object raises a
:class:`ValidationError`; well-formed input that violates an operation's
precondition raises a :class:`PreconditionError`. The CLI maps the first to
exit code 1 and the second to exit code 2.
"""


class MMError(ValueError):
    pass


class ValidationError(MMError):
    pass


class PreconditionError(MMError):
    pass


# -- space validation -------------------------------------------------------

class MalformedSpace(ValidationError):
    pass


class AsymmetricMatrix(ValidationError):
    def __init__(self, i, j):
        super().__init__(f"dist[{i}][{j}] != dist[{j}][{i}]")
        self.i, self.j = i, j


class TriangleViolation(ValidationError):
    def __init__(self, i, j, k):
        super().__init__(f"dist[{i}][{k}] > dist[{i}][{j}] + dist[{j}][{k}]")
        self.i, self.j, self.k = i, j, k


class NonpositiveWeight(ValidationError):
    def __init__(self, i):
        super().__init__(f"weight {i} is not strictly positive")
        self.i = i


class WeightSumNotOne(ValidationError):
    pass


class ZeroDistanceDistinctPoints(ValidationError):
    def __init__(self, i, j):
        super().__init__(f"points {i} and {j} are distinct but at distance 0")
        self.i, self.j = i, j


class InvalidKappa(ValidationError):
    pass


class InvalidDelta(ValidationError):
    pass


class InvalidAtomSequence(ValidationError):
    pass


# -- preconditions ----------------------------------------------------------

class NonpositiveScale(PreconditionError):
    pass


class AlphaOutOfRange(PreconditionError):
    pass


class OutOfDomain(PreconditionError):
    pass


class DimensionMismatch(PreconditionError):
    pass


class DomainMismatch(PreconditionError):
    pass


class InvalidCoupling(PreconditionError):
    pass


class NotInXDelta(PreconditionError):
    pass


class NotSameOrbit(PreconditionError):
    pass


class KappaSumTooLarge(PreconditionError):
    pass


class NotInPiKappa(PreconditionError):
    pass


class EqualSequences(PreconditionError):
    pass


class MTooSmall(PreconditionError):
    pass


class EpsOutOfRange(PreconditionError):
    pass


class RTooSmall(PreconditionError):
    pass


class SinglePointSpace(PreconditionError):
    pass


class ReportMismatch(ValidationError):
    """A stored experiment verdict disagrees with its recomputation."""
