"""Exception hierarchy.

Everything a caller can reasonably recover from derives from SixVertexError,
so the CLI can map it to exit code 1 in one place.
"""


class SixVertexError(Exception):
    pass


# weights / phase
class NotFerroelectric(SixVertexError):
    pass


class SlopeOutOfRange(SixVertexError):
    pass


class DegenerateSchedule(SixVertexError):
    pass


# lattice
class OutOfDomain(SixVertexError):
    pass


class InconsistentEnsemble(SixVertexError):
    pass


class CrossingPaths(SixVertexError):
    pass


# exact engine
class DomainTooLarge(SixVertexError):
    pass


class InconsistentBoundary(SixVertexError):
    pass


class EmptyEnsembleClass(SixVertexError):
    pass


# sampler / restriction
class SpecMismatch(SixVertexError):
    pass


class BadRestrictionParams(SixVertexError):
    pass


class PreconditionViolated(SixVertexError):
    pass


# statistics
class PatternWindowOutOfDomain(SixVertexError):
    pass


class IndexOutOfRange(SixVertexError):
    pass


class InsufficientSamples(SixVertexError):
    pass


# extension
class ExtensionError(SixVertexError):
    pass


class NegativeFlow(ExtensionError):
    pass


class BalanceViolation(ExtensionError):
    pass


class MonotoneViolation(ExtensionError):
    def __init__(self, msg, index=None):
        super().__init__(msg)
        self.index = index


class CorridorOverflow(ExtensionError):
    """A flow K_i does not fit in the strip it is meant to cross."""
