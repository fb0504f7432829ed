"""Exception types shared across the workbench."""


class TreelogicError(Exception):
    """Base class for all workbench errors."""


class ParseError(TreelogicError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class NotSubstitutable(TreelogicError):
    """Substituting would capture a variable under a binder."""


class UnboundVariable(TreelogicError):
    pass


class LogicMismatch(TreelogicError):
    """Formula uses a constructor outside the declared logic."""


class StructureError(TreelogicError):
    pass


class NotStandard(TreelogicError):
    """Operation requires a Full (standard) admissible family."""


class SchemaError(TreelogicError):
    """Axiom-schema side condition violated; message states the condition."""


class IllegalMove(TreelogicError):
    pass


class GameBudgetExceeded(TreelogicError):
    """Game search exceeded its position budget; not a verdict."""


class EnumerationBudget(TreelogicError):
    pass
