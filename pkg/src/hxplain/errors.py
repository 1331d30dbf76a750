"""Exception hierarchy shared by the explainer and the environments."""


class HxplainError(Exception):
    """Base class for all library errors."""


class IllegalAction(HxplainError, ValueError):
    pass


class TerminalState(IllegalAction):
    """A real action was requested from an absorbing state."""


class PolicyUndefined(HxplainError, KeyError):
    pass


class SchemaMismatch(HxplainError, ValueError):
    pass


class UnknownPredicate(HxplainError, ValueError):
    pass


class MissingReference(HxplainError, ValueError):
    pass


class EmptyMatchSet(HxplainError, ValueError):
    pass


class SpaceTooLarge(HxplainError):
    pass


class BudgetExhausted(HxplainError):
    pass


class EmptyHistory(HxplainError, ValueError):
    pass


class TooLarge(HxplainError):
    """Raised by the brute-force oracles when an instance exceeds their guard."""
