"""Exception types shared across the package."""


class FBetaPenaltyError(Exception):
    """Base class for domain errors raised by this package."""


class DegenerateInput(FBetaPenaltyError, ValueError):
    """Inputs sit on a point where the formula is undefined (e.g. 0/0)."""


class NumericalUnderflow(FBetaPenaltyError, ArithmeticError):
    """A log-space intermediate left the representable floating range."""


class EmptyBatch(FBetaPenaltyError, ValueError):
    pass


class EmptyDataset(FBetaPenaltyError, ValueError):
    pass


class ShapeMismatch(FBetaPenaltyError, ValueError):
    pass


class OutOfRangeHeight(FBetaPenaltyError, ValueError):
    """Fill height outside [0, 2r] (cylinder) or [0, 2a] (ellipse)."""
