"""Exception types raised across the package."""


class QuantumNumberError(ValueError):
    """A (q, n_a, n_b) coordinate lies outside the truncated space."""


class SpaceMismatchError(ValueError):
    """Two objects live on different Hilbert spaces."""


class NonHermitianError(ValueError):
    """A matrix handed to the propagator is not Hermitian."""


class SingularityError(ZeroDivisionError):
    """A formula hit a vanishing detuning or rate."""


class PreconditionError(ValueError):
    """Parameters violate a required condition (e.g. frequency matching)."""


class CompilationError(RuntimeError):
    """The synthesis compiler could not reach the vacuum within tolerance."""

    def __init__(self, message, node=None, residual=None):
        super().__init__(message)
        self.node = node
        self.residual = residual


class NumericalError(RuntimeError):
    """Integration lost accuracy (norm drift beyond tolerance)."""

    def __init__(self, message, segment_index=None):
        super().__init__(message)
        self.segment_index = segment_index


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""
