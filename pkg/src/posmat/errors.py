"""Exception types shared across the package."""


class PosmatError(Exception):
    pass


class RingMismatch(PosmatError, TypeError):
    pass


class NotAUnit(PosmatError, ArithmeticError):
    pass


class DimensionMismatch(PosmatError, ValueError):
    pass


class NotMonomial(PosmatError, ValueError):
    pass


class NotInvolution(PosmatError, ValueError):
    pass


class UnsupportedRing(PosmatError, ValueError):
    pass


class InvalidTriple(PosmatError, ValueError):
    pass


class NotAutomorphism(PosmatError):
    """Raised by a decomposition stage when the oracle contradicts a structural property.

    ``witness`` is whatever concrete data exposes the failure, usually a
    matrix or a small dict of scalars.
    """

    def __init__(self, stage: str, reason: str, witness=None):
        super().__init__(f"[{stage}] {reason}")
        self.stage = stage
        self.reason = reason
        self.witness = witness


class UnfittableRingMap(PosmatError):
    """The extracted data is consistent but matches no catalog member."""

    def __init__(self, stage: str, reason: str, table=None):
        super().__init__(f"[{stage}] {reason}")
        self.stage = stage
        self.reason = reason
        self.table = table
