"""Exception hierarchy shared by all modules."""


class InputError(ValueError):
    """Malformed input: foreign symbols, empty words where forbidden, bad ids."""


class ParseError(InputError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        parts = []
        if line is not None:
            parts.append(f"line {line}")
        if column is not None:
            parts.append(f"column {column}")
        where = ", ".join(parts) + ": " if parts else ""
        super().__init__(where + message)


class NonTerminationError(RuntimeError):
    """A rewriting run exhausted its step budget."""


class ContractViolation(RuntimeError):
    """An operation was called outside its precondition (e.g. unclosed table)."""


class DivergenceError(RuntimeError):
    """The learner stopped making progress, usually because of wrong advice."""

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


class AdviceError(RuntimeError):
    """Advice cannot be used as requested (non-convergent, step budget blown)."""


class UnsupportedAdviceError(AdviceError):
    pass
