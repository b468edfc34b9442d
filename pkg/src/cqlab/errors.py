"""Typed errors shared across the package."""


class CqlabError(Exception):
    """Base class for all library errors."""


class DimensionCap(CqlabError):
    pass


class BasisDependent(CqlabError):
    pass


class NotInSet(CqlabError):
    pass


class AnalyticGamma(CqlabError):
    """An exact cone computation was asked of an oracle-only set."""


class AssumptionNotGuaranteed(CqlabError):
    """The requested multi-index is not admissible by structure."""


class OrderCap(CqlabError):
    pass


class UnknownFunction(CqlabError):
    pass


class ExpressionSyntaxError(SyntaxError, CqlabError):
    """Parse error carrying a 0-based character offset."""

    def __init__(self, msg: str, text: str, offset: int):
        super().__init__(f"{msg} at offset {offset}")
        self.msg = msg
        self.text = text
        self.offset = offset


class InfeasiblePoint(CqlabError):
    pass


class MissingObjective(CqlabError):
    pass


class EmptyPool(CqlabError):
    pass


class InexactDerivative(CqlabError):
    """Exact cone work needs rational derivatives but only an enclosure exists."""


class InternalConsistencyError(CqlabError):
    pass


class ProblemFileError(CqlabError):
    pass
