"""Exception hierarchy shared across the package."""


class TorusFlowError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(TorusFlowError):
    """Invalid run configuration. Carries every violation found, not just the first."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {v}" for v in self.violations))


class ProjectionError(TorusFlowError):
    """A point left the tubular neighbourhood where the closest-point projection is defined."""

    def __init__(self, message, grid_index=None):
        self.grid_index = grid_index
        super().__init__(message)


class ContractViolation(TorusFlowError):
    """An operation was called with arguments violating its stated precondition."""


class FlowAbort(TorusFlowError):
    """The time stepper had to give up; the offending state is attached when available."""

    def __init__(self, message, state=None):
        self.state = state
        super().__init__(message)


class EnergyGuardError(FlowAbort):
    """Energy increased beyond the per-step tolerance (dt too large, or a discretization bug)."""


class LatticeFloorError(FlowAbort):
    """The lattice parameter b dropped below the hard floor 1e-6."""
