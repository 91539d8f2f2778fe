"""Exception types raised across the package."""


class InputError(ValueError):
    """Arguments violate an operation's preconditions."""


class TrainingError(RuntimeError):
    """Training produced a non-finite loss or gradient."""

    def __init__(self, message, epoch=None):
        super().__init__(message if epoch is None else f"epoch {epoch}: {message}")
        self.epoch = epoch
