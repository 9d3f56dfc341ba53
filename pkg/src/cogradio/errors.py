"""Exception types raised across the package."""


class InvalidParameterError(ValueError):
    pass


class EnumerationTooLargeError(ValueError):
    """The strategy space exceeds the exhaustive-scan cap."""


class UnsupportedConfigurationError(ValueError):
    pass


class InvalidStateError(RuntimeError):
    pass


class PacketNotHeard(Exception):
    """A control packet arrived below the decoding threshold."""
