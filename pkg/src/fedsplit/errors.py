"""Exception types shared across the package."""


class FedSplitError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(FedSplitError, ValueError):
    """Vector/mask dimensions are inconsistent."""


class ConfigError(FedSplitError, ValueError):
    """A configuration file or override is invalid; message names the key."""


class ProtocolError(FedSplitError, RuntimeError):
    """A protocol-phase invariant was violated (voting, aggregation order)."""


class EncodingOverflowError(FedSplitError, ValueError):
    """A plaintext value exceeds the fixed-point headroom of the HE scheme."""


class DivergenceError(FedSplitError, RuntimeError):
    """Training produced a non-finite loss or metric; the run is aborted."""
