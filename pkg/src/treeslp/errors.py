"""Exception types shared by all modules."""


class TreeSlpError(Exception):
    """Base class for every error raised by this package."""


class ParseError(TreeSlpError):
    def __init__(self, message, position=None, text=None):
        self.position = position
        if position is not None and text is not None:
            line = text.count("\n", 0, position) + 1
            col = position - (text.rfind("\n", 0, position) + 1) + 1
            message = f"{message} (line {line}, column {col})"
        elif position is not None:
            message = f"{message} (offset {position})"
        super().__init__(message)


class ArityError(TreeSlpError):
    """A symbol was used (or declared) with two different child counts."""

    def __init__(self, symbol, first, second):
        self.symbol = symbol
        super().__init__(f"symbol {symbol!r} used with {first} and {second} children")


class NotAPatternError(TreeSlpError):
    pass


class GrammarError(TreeSlpError):
    """A TSLP invariant is violated."""


class NotCnfError(GrammarError):
    pass


class UnsupportedShapeError(TreeSlpError):
    """Input is outside the shapes an algorithm handles."""


class UnsupportedRankError(UnsupportedShapeError):
    def __init__(self, symbol, rank, cap):
        self.symbol = symbol
        super().__init__(f"symbol {symbol!r} has rank {rank}, above the cap {cap}")


class ExpansionLimitError(TreeSlpError):
    pass


class MissingVariableError(TreeSlpError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"no value assigned to y{index}")
