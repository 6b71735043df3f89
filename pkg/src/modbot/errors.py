"""Exception types shared across the package."""


class ModbotError(Exception):
    """Base class for all package errors."""


class DimensionError(ModbotError):
    """A vector or matrix argument has an incompatible size."""


class ParameterError(ModbotError):
    """A numeric parameter is outside its valid range."""


class NumericDivergenceError(ModbotError):
    """Integration produced a non-finite state."""

    def __init__(self, message: str, t: float):
        super().__init__(message)
        self.t = t


class WireFormatError(ModbotError):
    """A payload failed to parse or violates the wire schema.

    ``offset`` is the byte position of the syntax error when known,
    otherwise None (schema-level violations).
    """

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class RoutingError(ModbotError):
    """A message reached a runtime it was not addressed to."""


class PresetNotFoundError(ModbotError):
    """Requested gait preset is not in the catalog."""

    def __init__(self, name: str, available: list[str]):
        super().__init__(
            f"unknown gait preset {name!r}; available: {', '.join(available) or '(none)'}"
        )
        self.name = name
        self.available = available


class CatalogError(ModbotError):
    """A gait catalog file failed to parse or validate."""

    def __init__(self, message: str, location: str | None = None):
        super().__init__(message if location is None else f"{message} [{location}]")
        self.location = location


class BridgeError(ModbotError):
    """The optional MQTT bridge was requested but cannot run."""
