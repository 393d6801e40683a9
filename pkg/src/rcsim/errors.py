"""Exception types raised by the simulators and samplers."""


class RcsimError(Exception):
    """Base class for domain errors (the CLI maps these to exit code 1)."""


class CircuitError(RcsimError, ValueError):
    """Malformed circuit: bad qubit index, non-unitary matrix, non-adjacent pair."""


class LimitExceeded(RcsimError):
    """A configured memory, path-count or work limit would be exceeded."""


class SamplingError(RcsimError):
    """Rejection sampling ran out of attempts."""
