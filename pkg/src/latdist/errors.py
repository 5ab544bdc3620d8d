"""Exception hierarchy shared by every module."""


class LatdistError(Exception):
    pass


class RankDeficient(LatdistError, ValueError):
    """Basis vectors are linearly dependent."""


class Singular(RankDeficient):
    """Square matrix has zero determinant."""


class BudgetExceeded(LatdistError):
    """Enumeration tree grew past the configured node cap."""

    def __init__(self, nodes, cap):
        super().__init__(f"enumeration exceeded node budget ({nodes} > {cap})")
        self.nodes = nodes
        self.cap = cap


class ViolationFound(LatdistError):
    """A proven inequality failed; always indicates a bug."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NonDividing(LatdistError, ValueError):
    pass


class NotUnipotent(LatdistError, ValueError):
    pass


class InvalidGamma(LatdistError, ValueError):
    pass


class NoWitnessFound(LatdistError):
    pass


class ReductionFailure(LatdistError):
    """A reduction loop hit its iteration cap or produced an invalid basis."""
