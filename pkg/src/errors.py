"""Exceptions shared by the calculus services and the command line."""


class CalculusError(Exception):
    """Base class. `code` is the stable machine-readable name, `exit_code` the CLI status."""

    code = "CalculusError"
    exit_code = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def __str__(self):
        return f"{self.code}: {self.message}"


# Syntax

class SyntaxFailure(CalculusError):
    code = "SyntaxError"
    exit_code = 3

    def __init__(self, message: str, line: int = None, column: int = None):
        super().__init__(message)
        self.line = line
        self.column = column

    def __str__(self):
        if self.line is None:
            return f"{self.code}: {self.message}"
        return f"{self.code} at {self.line}:{self.column}: {self.message}"


class LexicalError(SyntaxFailure):
    code = "LexicalError"


class ParseError(SyntaxFailure):
    code = "ParseError"


class UnboundVariableError(SyntaxFailure):
    code = "UnboundVariable"


class SourceTooLarge(SyntaxFailure):
    code = "SourceTooLarge"


class SourceNotFound(SyntaxFailure):
    code = "SourceNotFound"


# Typing

class TypingError(CalculusError):
    """A Church-style typing failure at `subterm`; `types` are the canonical types involved."""

    code = "TypingError"
    exit_code = 2

    def __init__(self, message: str, subterm=None, types=()):
        super().__init__(message)
        self.subterm = subterm
        self.types = tuple(types)
        self.location = None

    def __str__(self):
        if self.location is None:
            return f"{self.code}: {self.message}"
        return f"{self.code} at {self.location}: {self.message}"


class NotAnArrow(TypingError):
    code = "NotAnArrow"


class DomainMismatch(TypingError):
    code = "DomainMismatch"


class NotAConjunctionContaining(TypingError):
    code = "NotAConjunctionContaining"


class EscapingTypeVariable(TypingError):
    code = "EscapingTypeVariable"


class NotUniversal(TypingError):
    code = "NotUniversal"


class IllTyped(TypingError):
    """Raised by the reduction services when their input does not type-check."""

    code = "IllTyped"

    def __init__(self, cause: TypingError):
        super().__init__(str(cause), cause.subterm, cause.types)
        self.cause = cause
        self.location = cause.location
