"""Exception types shared across the solver suite."""


class RelfluidError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(RelfluidError):
    """A scenario, grid, or solver parameter violates its domain."""


class UsageError(RelfluidError):
    """An operation was called with structurally incompatible arguments."""


class DomainError(RelfluidError):
    """A radius or state lies outside the domain of definition."""


class NumericalError(RelfluidError):
    """Non-finite values or a failed stability contract during time stepping."""

    def __init__(self, message, step=None, cell=None):
        super().__init__(message)
        self.step = step
        self.cell = cell


class SchemeError(NumericalError):
    """A scheme produced an inadmissible state."""


class UnphysicalStateError(RelfluidError):
    """Conserved variables do not correspond to an admissible fluid state."""


class InadmissibleShockError(RelfluidError):
    """Requested standing-shock data violate the admissibility window."""


class SolverError(RelfluidError):
    """A root finder or implicit solve failed; carries diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class TruncatedTrajectoryError(RelfluidError):
    """A wave trajectory left its domain of definition before the requested time."""

    def __init__(self, message, exit_time=None, exit_radius=None):
        super().__init__(message)
        self.exit_time = exit_time
        self.exit_radius = exit_radius
