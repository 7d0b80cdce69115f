"""
Exception hierarchy for the spin-array addressing toolkit
"""


class SpinAddressError(Exception):
    """Base class for every error raised by spinaddress"""


class InvalidAxisError(SpinAddressError, ValueError):
    """Rotation axis is not a recognised label or not a unit vector"""


class DriveParameterError(SpinAddressError, ValueError):
    """Microwave drive parameters violate the synchronization bounds"""


class SwapSynthesisError(SpinAddressError, ValueError):
    """Composite exchange sequence has no real solution"""


class NoPartnerError(SpinAddressError, LookupError):
    """No qubit in a different bin is reachable from the target"""


class NonAddressableError(SpinAddressError, ValueError):
    """Every qubit of the configuration shares a single bin"""


class ConfigError(SpinAddressError, ValueError):
    """Invalid run configuration value"""

    def __init__(self, field: str, message: str) -> None:
        self.field = field
        super().__init__(f"{field}: {message}")


class BookkeepingError(SpinAddressError, RuntimeError):
    """An ideal sequence leaves a spectator rotated or misses the target gate"""
