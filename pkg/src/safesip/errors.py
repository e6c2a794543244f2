"""Exception types raised across the simulator."""


class SafeSipError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(SafeSipError, ValueError):
    pass


class DimensionError(SafeSipError, ValueError):
    pass


class SerializationError(SafeSipError, ValueError):
    pass


class TamperDecodeError(SafeSipError):
    """A garbled word matched neither valid encoding of its wire."""


class WriteOnceViolation(SafeSipError):
    pass


class UnprovisionedError(SafeSipError):
    pass


class CapacityError(SafeSipError):
    pass


class DisabledError(SafeSipError):
    pass


class ProtocolOrderError(SafeSipError):
    pass


class CalibrationError(SafeSipError, ValueError):
    pass


class RoutingError(SafeSipError):
    pass


class ReplaySourceError(SafeSipError, LookupError):
    pass


class AlreadyEnrolledError(SafeSipError):
    pass


class NotEnrolledError(SafeSipError):
    pass


class FreshnessError(SafeSipError):
    """A boot nonce was presented twice to the same assembly."""


class StatisticalFloorError(SafeSipError, ValueError):
    pass


class ConfigError(SafeSipError, ValueError):
    """Invalid scenario configuration.

    ``key`` and ``line`` point at the offending entry when known.
    """

    def __init__(self, message, key=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.key = key
        self.line = line
