"""Exception types shared across the package."""


class MarkerlocError(Exception):
    """Base class for all markerloc errors."""


class InvalidRotationError(MarkerlocError):
    """A matrix fails the rotation-matrix invariants (orthonormal, det +1)."""


class UnknownMarkerError(MarkerlocError):
    """A detection references a marker id that the marker map cannot resolve."""


class OrderingError(MarkerlocError):
    """A stream that must be time-ordered is not."""


class CoverDetectionError(MarkerlocError):
    """No cover dip could be found in the RSSI stream."""


class ExtrapolationError(MarkerlocError):
    """A timestamp falls outside the trajectory span."""


class ParseError(MarkerlocError):
    """A data file is malformed. Carries the offending line number."""

    def __init__(self, path, line_no, message):
        self.path = str(path)
        self.line_no = line_no
        self.message = message
        super().__init__(f"{self.path}:{line_no}: {message}")
