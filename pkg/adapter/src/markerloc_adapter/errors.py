"""Adapter exception types."""


class AdapterError(Exception):
    """Base class for adapter errors."""


class ProfileError(AdapterError):
    """A camera profile is missing, malformed, or uncalibrated."""


class CalibrationError(AdapterError):
    """Calibration cannot proceed (too few usable chart views)."""
