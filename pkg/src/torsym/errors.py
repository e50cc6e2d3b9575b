"""Exception hierarchy shared by all modules."""


class TorsymError(Exception):
    pass


class ParseError(TorsymError):
    """Malformed expression text; ``offset`` is the byte offset of the fault."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class EvalError(TorsymError):
    """Expression evaluation hit a singular point."""

    def __init__(self, message, subexpr):
        super().__init__(f"{message}: {subexpr}")
        self.subexpr = subexpr


class RefusalError(TorsymError):
    """A computation was refused because its result would not be trustworthy."""


class AliasingError(RefusalError):
    pass


class TruncationError(RefusalError):
    pass


class IllConditionedError(RefusalError):
    pass


class NotHomogeneousError(RefusalError):
    pass


class DomainError(RefusalError):
    pass


class InconsistencyError(RefusalError):
    pass


class OrderError(RefusalError):
    """The declared order is outside the range where the method is valid."""


class SpecError(TorsymError):
    """Invalid symbol-spec document."""


class MissingSpinError(RefusalError):
    """A symbol was queried at a spin it does not define."""


class UsageError(TorsymError):
    """Inputs are valid on their own but the requested operation does not apply."""
