class LabError(Exception):
    """Base error for every numerical module of the lab.

    ``details`` carries the machine-readable context (residuals, times,
    brackets) that the experiment layer copies into run metadata.
    """

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def __str__(self):
        if not self.details:
            return self.message
        extra = ', '.join(f'{key}={value!r}' for key, value in self.details.items()
                          if not hasattr(value, '__len__') or isinstance(value, str))
        return f'{self.message} ({extra})' if extra else self.message


class InvalidFieldError(LabError):
    pass


class ModelConfigurationError(LabError):
    pass


class SingularInvariantError(LabError):
    pass


class BlowupSuspectedError(LabError):
    """Non-finite values during a step; ``last_state`` is the last good state."""

    def __init__(self, message, t, last_state=None, **details):
        super().__init__(message, t=t, **details)
        self.t = t
        self.last_state = last_state


class NonConvergenceError(LabError):
    def __init__(self, message, residual_history=(), **details):
        super().__init__(message, **details)
        self.residual_history = list(residual_history)


class MultivaluedRegionError(LabError):
    def __init__(self, message, bracket, **details):
        super().__init__(message, bracket=tuple(bracket), **details)
        self.bracket = tuple(bracket)


class NearCausticError(LabError):
    pass


class CriticalPointError(LabError):
    pass


class GenericityError(LabError):
    pass


class PI2DivergenceError(LabError):
    pass


class PI2AccuracyError(LabError):
    pass


class DegenerateDispersionError(LabError):
    pass


class OutOfWindowError(LabError):
    pass


class NearCriticalError(LabError):
    pass


class ObstructionError(LabError):
    pass


class FitError(LabError):
    pass


class EmptyWindowError(LabError):
    pass


class OutputError(LabError):
    pass
