"""Exception types shared across the package."""


class FracdampError(Exception):
    """Base class; lets callers catch any package-level failure at once."""


class ParameterError(FracdampError, ValueError):
    """A physical or numerical parameter violates its admissible range."""


class BranchCutError(FracdampError, ValueError):
    """A complex argument landed on (or across) the principal branch cut."""


class CertificationError(FracdampError, RuntimeError):
    """A synthesized quadrature failed its closed-form certification."""


class ShapeError(FracdampError, ValueError):
    """Array shapes of coupled state components do not match."""


class RootLossError(FracdampError, RuntimeError):
    """Newton/Muller refinement failed to converge or left its trust ball."""

    def __init__(self, message, seed=None, last_iterate=None):
        super().__init__(message)
        self.seed = seed
        self.last_iterate = last_iterate


class FitWindowError(FracdampError, RuntimeError):
    """The decay-fit window is unusable (too short, at round-off floor,
    or the trace is not a power law)."""


class NumericalError(FracdampError, RuntimeError):
    """Breakdown during time stepping (NaN state, singular solve)."""
