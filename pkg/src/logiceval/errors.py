"""Exception hierarchy shared by all logiceval modules."""


class LogicEvalError(Exception):
    """Base class for every error raised by this package."""


class ParseError(LogicEvalError):
    """Malformed formula text.

    ``pos`` is the character offset where parsing failed.
    """

    def __init__(self, message, pos=None, text=None):
        self.message = message
        self.pos = pos
        self.text = text
        if pos is not None:
            message = f"{message} at position {pos}"
        super().__init__(message)


class DuplicateBindingError(ParseError):
    """A quantifier list binds the same variable twice."""


class NormalizationError(LogicEvalError):
    pass


class ConversionError(LogicEvalError):
    pass


class SizeError(LogicEvalError):
    pass


class PreconditionError(LogicEvalError):
    pass


class ProverTimeout(LogicEvalError):
    """The entailment search ran out of budget."""


class FormatError(LogicEvalError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(LogicEvalError):
    def __init__(self, message, ids=()):
        self.ids = list(ids)
        super().__init__(message)


class EmptyInputError(LogicEvalError):
    pass
