"""Exception types shared across the package."""


class SignatureMismatch(ValueError):
    """Operands live in different algebras (grading, dimensions or order differ)."""


class NotInvertible(ArithmeticError):
    """Raised when the independent term of a jet or series vanishes at the center."""


class NotHomogeneous(ValueError):
    pass


class DegreeMismatch(ValueError):
    pass


class NotCentered(ValueError):
    pass


class InvalidSignTable(ValueError):
    pass


class MissingTransition(KeyError):
    pass


class ParseError(ValueError):
    """Syntax or semantic error in textual input, with 1-based position."""

    def __init__(self, message, line=1, column=1, source=None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{column}: {message}")
