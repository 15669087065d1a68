"""Line-delimited text formats, config parsing, and strict readers.

Every format starts with a magic version line and a `# columns:` header;
readers honor the header's column order rather than assuming positions, and
reject malformed input with line-numbered diagnostics instead of repairing
it. Floats are written with repr precision so write/read roundtrips are
lossless.
"""

from __future__ import annotations

import logging
import re

import numpy as np

from .errors import OrderingError, ParseError
from .evaluation import PathSegment
from .geometry import MarkerObservation, MarkerSpec
from .smoothing import FinalPose
from .sync import AnnotatedSample, RssiSample

log = logging.getLogger(__name__)

_MAC_RE = re.compile(r"^[0-9A-Fa-f]{2}(:[0-9A-Fa-f]{2}){5}$")

DETECTIONS_MAGIC = "# markerloc detections v1"
RSSI_MAGIC = "# markerloc rssi v1"
ANNOTATED_MAGIC = "# markerloc annotated v1"
MARKERS_MAGIC = "# markerloc markers v1"
TRAJECTORY_MAGIC = "# markerloc trajectory v1"
PATHS_MAGIC = "# markerloc paths v1"
CONFIG_MAGIC = "# markerloc config v1"

_DETECTION_COLUMNS = ["timestamp", "camera_id", "marker_id",
                      "tx", "ty", "tz", "rx", "ry", "rz"]
_RSSI_COLUMNS = ["timestamp", "transmitter", "sensor", "rssi"]
_ANNOTATED_COLUMNS = ["timestamp", "transmitter", "sensor", "rssi",
                      "x", "y", "z",
                      "r00", "r01", "r02", "r10", "r11", "r12",
                      "r20", "r21", "r22"]
_MARKER_COLUMNS = ["id", "x", "y", "z", "rx", "ry", "rz", "edge_length"]
_TRAJECTORY_COLUMNS = ["timestamp", "x", "y", "z", "rx", "ry", "rz"]
_PATH_COLUMNS = ["sx", "sy", "sz", "ex", "ey", "ez", "start_time", "end_time"]


def _fmt(value: float) -> str:
    return repr(float(value))


def _read_rows(path, magic, canonical_columns):
    """Shared strict reader: magic line, column header, whitespace rows.

    Yields (line_no, {column: field}) for each data row.
    """
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    if not lines or lines[0].strip() != magic:
        raise ParseError(path, 1, f"expected magic line {magic!r}")
    columns = None
    rows = []
    for line_no, line in enumerate(lines[1:], start=2):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if stripped.lower().startswith("# columns:"):
                names = stripped.split(":", 1)[1].split()
                if sorted(names) != sorted(canonical_columns):
                    raise ParseError(
                        path, line_no,
                        f"columns header must name exactly {canonical_columns}",
                    )
                columns = names
            continue
        if columns is None:
            raise ParseError(path, line_no, "data before '# columns:' header")
        fields = stripped.split()
        if len(fields) != len(columns):
            raise ParseError(
                path, line_no,
                f"expected {len(columns)} fields, found {len(fields)}",
            )
        rows.append((line_no, dict(zip(columns, fields))))
    if columns is None:
        raise ParseError(path, 1, "missing '# columns:' header")
    return rows


def _parse_float(path, line_no, name, text):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(path, line_no, f"{name}: not a number: {text!r}") from None
    if not np.isfinite(value):
        raise ParseError(path, line_no, f"{name}: must be finite, got {text!r}")
    return value


def _parse_int(path, line_no, name, text):
    try:
        return int(text)
    except ValueError:
        raise ParseError(path, line_no, f"{name}: not an integer: {text!r}") from None


def _parse_mac(path, line_no, name, text):
    if not _MAC_RE.match(text):
        raise ParseError(path, line_no, f"{name}: invalid MAC address {text!r}")
    return text


def read_detections(path) -> list[MarkerObservation]:
    """Marker detections, one per line; per-camera timestamps must not go back."""
    out = []
    last_seen: dict[int, float] = {}
    for line_no, row in _read_rows(path, DETECTIONS_MAGIC, _DETECTION_COLUMNS):
        ts = _parse_float(path, line_no, "timestamp", row["timestamp"])
        camera = _parse_int(path, line_no, "camera_id", row["camera_id"])
        marker = _parse_int(path, line_no, "marker_id", row["marker_id"])
        tvec = [_parse_float(path, line_no, k, row[k]) for k in ("tx", "ty", "tz")]
        rvec = [_parse_float(path, line_no, k, row[k]) for k in ("rx", "ry", "rz")]
        if camera in last_seen and ts < last_seen[camera]:
            raise OrderingError(
                f"{path}:{line_no}: camera {camera} timestamps go backward"
            )
        last_seen[camera] = ts
        out.append(MarkerObservation(ts, camera, marker, tvec, rvec))
    return out


def write_detections(path, observations) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(DETECTIONS_MAGIC + "\n")
        handle.write("# columns: " + " ".join(_DETECTION_COLUMNS) + "\n")
        handle.write("# units: s - - m m m rad rad rad\n")
        for o in observations:
            handle.write(" ".join(
                [_fmt(o.timestamp), str(o.camera_id), str(o.marker_id)]
                + [_fmt(v) for v in o.position]
                + [_fmt(v) for v in o.rotation]
            ) + "\n")


def read_rssi_log(path) -> list[RssiSample]:
    """RSSI readings; MACs validated, values confined to [-120, 0] dBm."""
    out = []
    last_seen: dict[tuple, float] = {}
    for line_no, row in _read_rows(path, RSSI_MAGIC, _RSSI_COLUMNS):
        ts = _parse_float(path, line_no, "timestamp", row["timestamp"])
        transmitter = _parse_mac(path, line_no, "transmitter", row["transmitter"])
        sensor = _parse_mac(path, line_no, "sensor", row["sensor"])
        rssi = _parse_float(path, line_no, "rssi", row["rssi"])
        if not -120.0 <= rssi <= 0.0:
            raise ParseError(path, line_no, f"rssi {rssi} outside [-120, 0] dBm")
        key = (transmitter, sensor)
        if key in last_seen and ts < last_seen[key]:
            raise OrderingError(
                f"{path}:{line_no}: stream {key} timestamps go backward"
            )
        last_seen[key] = ts
        out.append(RssiSample(ts, transmitter, sensor, rssi))
    return out


def write_rssi_log(path, samples) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(RSSI_MAGIC + "\n")
        handle.write("# columns: " + " ".join(_RSSI_COLUMNS) + "\n")
        handle.write("# units: s mac mac dBm\n")
        for s in samples:
            handle.write(
                f"{_fmt(s.timestamp)} {s.transmitter} {s.sensor} {_fmt(s.rssi)}\n"
            )


def read_annotated(path) -> list[AnnotatedSample]:
    """Position-annotated RSSI records with the row-major rotation matrix."""
    out = []
    for line_no, row in _read_rows(path, ANNOTATED_MAGIC, _ANNOTATED_COLUMNS):
        ts = _parse_float(path, line_no, "timestamp", row["timestamp"])
        transmitter = _parse_mac(path, line_no, "transmitter", row["transmitter"])
        sensor = _parse_mac(path, line_no, "sensor", row["sensor"])
        rssi = _parse_float(path, line_no, "rssi", row["rssi"])
        if not -120.0 <= rssi <= 0.0:
            raise ParseError(path, line_no, f"rssi {rssi} outside [-120, 0] dBm")
        position = np.array([
            _parse_float(path, line_no, k, row[k]) for k in ("x", "y", "z")
        ])
        matrix = np.array([
            _parse_float(path, line_no, k, row[k])
            for k in _ANNOTATED_COLUMNS[7:]
        ]).reshape(3, 3)
        if np.max(np.abs(matrix.T @ matrix - np.eye(3))) > 1e-9:
            raise ParseError(path, line_no, "rotation matrix is not orthonormal")
        out.append(AnnotatedSample(ts, transmitter, sensor, rssi, position, matrix))
    return out


def write_annotated(path, samples) -> None:
    """One 16-column record per sample; an empty input yields a header-only file."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(ANNOTATED_MAGIC + "\n")
        handle.write("# columns: " + " ".join(_ANNOTATED_COLUMNS) + "\n")
        handle.write("# units: s mac mac dBm m m m - - - - - - - - -\n")
        for s in samples:
            handle.write(" ".join(
                [_fmt(s.timestamp), s.transmitter, s.sensor, _fmt(s.rssi)]
                + [_fmt(v) for v in s.position]
                + [_fmt(v) for v in np.asarray(s.rotation_matrix).ravel()]
            ) + "\n")


def read_marker_map(path) -> dict[int, MarkerSpec]:
    """Surveyed marker poses keyed by id; duplicate ids are rejected."""
    markers: dict[int, MarkerSpec] = {}
    off_grid = []
    for line_no, row in _read_rows(path, MARKERS_MAGIC, _MARKER_COLUMNS):
        marker_id = _parse_int(path, line_no, "id", row["id"])
        if marker_id in markers:
            raise ParseError(path, line_no, f"duplicate marker id {marker_id}")
        position = [_parse_float(path, line_no, k, row[k]) for k in ("x", "y", "z")]
        rotation = [_parse_float(path, line_no, k, row[k]) for k in ("rx", "ry", "rz")]
        edge = _parse_float(path, line_no, "edge_length", row["edge_length"])
        if edge <= 0:
            raise ParseError(path, line_no, "edge_length must be positive")
        remainder = np.abs(np.mod(np.abs(rotation), np.pi / 2.0))
        if np.any(np.minimum(remainder, np.pi / 2.0 - remainder) > 1e-9):
            off_grid.append(marker_id)
        markers[marker_id] = MarkerSpec(marker_id, position, rotation, edge)
    if off_grid:
        log.info(
            "marker map: rotations of markers %s are not quarter-turn multiples",
            off_grid,
        )
    return markers


def write_marker_map(path, markers) -> None:
    items = markers.values() if isinstance(markers, dict) else markers
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(MARKERS_MAGIC + "\n")
        handle.write("# frame: world\n")
        handle.write("# columns: " + " ".join(_MARKER_COLUMNS) + "\n")
        handle.write("# units: - m m m rad rad rad m\n")
        for m in items:
            handle.write(" ".join(
                [str(m.id)]
                + [_fmt(v) for v in m.position]
                + [_fmt(v) for v in m.rotation]
                + [_fmt(m.edge_length)]
            ) + "\n")


def read_trajectory(path) -> list[FinalPose]:
    """Smoothed (or true) poses; timestamps must be strictly increasing."""
    out: list[FinalPose] = []
    for line_no, row in _read_rows(path, TRAJECTORY_MAGIC, _TRAJECTORY_COLUMNS):
        ts = _parse_float(path, line_no, "timestamp", row["timestamp"])
        position = [_parse_float(path, line_no, k, row[k]) for k in ("x", "y", "z")]
        rotation = [_parse_float(path, line_no, k, row[k]) for k in ("rx", "ry", "rz")]
        if out and ts <= out[-1].timestamp:
            raise OrderingError(
                f"{path}:{line_no}: trajectory timestamps must strictly increase"
            )
        out.append(FinalPose(ts, np.array(position), np.array(rotation)))
    return out


def write_trajectory(path, poses) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(TRAJECTORY_MAGIC + "\n")
        handle.write("# columns: " + " ".join(_TRAJECTORY_COLUMNS) + "\n")
        handle.write("# units: s m m m rad rad rad\n")
        for p in poses:
            handle.write(" ".join(
                [_fmt(p.timestamp)]
                + [_fmt(v) for v in p.position]
                + [_fmt(v) for v in p.rotation]
            ) + "\n")


def read_paths(path) -> list[PathSegment]:
    """Predetermined path segments; '-' marks absent traversal times."""
    out = []
    for line_no, row in _read_rows(path, PATHS_MAGIC, _PATH_COLUMNS):
        start = [_parse_float(path, line_no, k, row[k]) for k in ("sx", "sy", "sz")]
        end = [_parse_float(path, line_no, k, row[k]) for k in ("ex", "ey", "ez")]
        times = []
        for key in ("start_time", "end_time"):
            text = row[key]
            times.append(None if text == "-"
                         else _parse_float(path, line_no, key, text))
        try:
            out.append(PathSegment(start, end, times[0], times[1]))
        except ValueError as exc:
            raise ParseError(path, line_no, str(exc)) from None
    return out


def write_paths(path, segments) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(PATHS_MAGIC + "\n")
        handle.write("# columns: " + " ".join(_PATH_COLUMNS) + "\n")
        handle.write("# units: m m m m m m s s\n")
        for seg in segments:
            times = [
                "-" if t is None else _fmt(t)
                for t in (seg.start_time, seg.end_time)
            ]
            handle.write(" ".join(
                [_fmt(v) for v in seg.start]
                + [_fmt(v) for v in seg.end]
                + times
            ) + "\n")


def read_key_values(path, magic=CONFIG_MAGIC) -> dict[str, str]:
    """`key = value` config lines; used for run configs and plot settings."""
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    if not lines or lines[0].strip() != magic:
        raise ParseError(path, 1, f"expected magic line {magic!r}")
    out: dict[str, str] = {}
    for line_no, line in enumerate(lines[1:], start=2):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ParseError(path, line_no, "expected 'key = value'")
        key, value = stripped.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def write_key_values(path, values, magic=CONFIG_MAGIC) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(magic + "\n")
        for key, value in values.items():
            handle.write(f"{key} = {value}\n")
