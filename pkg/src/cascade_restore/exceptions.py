"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Array dimensions violate an operation's contract."""


class ConfigurationError(ValueError):
    """Parameter combination is invalid or infeasible."""


class PgmParseError(ValueError):
    """Malformed PGM stream; ``offset`` is the byte position of the defect."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class NumericError(ArithmeticError):
    """Non-finite values appeared mid-iteration; ``iteration`` locates it."""

    def __init__(self, message, iteration):
        super().__init__(f"{message} (iteration {iteration})")
        self.iteration = iteration
