"""Exception types shared across the package."""


class TemponetError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigurationError(TemponetError):
    """Invalid configuration or input data."""

    exit_code = 2


class GraphabilityError(TemponetError):
    """Sequences cannot be realized as a simple clustered graph."""

    exit_code = 3


class WiringError(TemponetError):
    """Stub pairing failed after exhausting the repair budget."""

    exit_code = 4


class LatticeOverflowError(TemponetError):
    """Solution space larger than the enumeration cap.

    Callers catching this signal should fall back to heuristic-only mode.
    """

    def __init__(self, cap, partial_count):
        super().__init__(f"more than {cap} lattice points (stopped at {partial_count})")
        self.cap = cap
        self.partial_count = partial_count
