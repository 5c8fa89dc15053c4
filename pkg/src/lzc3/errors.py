"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class DegenerateSlopeError(DomainError):
    """Slopes are equal or zero, so the model (and its case split) is undefined."""


class NumericalError(RuntimeError):
    """An evaluation failed to reach the requested accuracy.

    Carries whatever partial diagnostics were available at the point of
    failure in ``diagnostics``.
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class IntegrationFailure(NumericalError):
    """The ODE propagator exhausted its step budget or lost unitarity."""
