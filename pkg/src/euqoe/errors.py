"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class ConvergenceError(ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    ``partial`` carries whatever estimate was available when it gave up,
    ``diagnostics`` a free-form dict for reporting.
    """

    def __init__(self, message, partial=None, diagnostics=None):
        super().__init__(message)
        self.partial = partial
        self.diagnostics = dict(diagnostics or {})


class InvalidEngineError(DomainError):
    """The cycle does not absorb heat in the hot stage, so no efficiency exists."""
