"""Synthetic pinhole rendering: project planar patches (markers, charts)
into views at known poses, so detection and calibration have exact ground
truth."""

import cv2
import numpy as np
import pytest

IMAGE_SIZE = (960, 720)


def intrinsics(fx=800.0, fy=800.0, cx=480.0, cy=360.0) -> np.ndarray:
    return np.array([[fx, 0.0, cx], [0.0, fy, cy], [0.0, 0.0, 1.0]])


def facing_rvec(wobble=(0.0, 0.0, 0.0)) -> np.ndarray:
    """Rotation of a patch facing the camera (pattern side toward lens),
    perturbed by a small rotation."""
    flip = cv2.Rodrigues(np.array([np.pi, 0.0, 0.0]))[0]
    rotation = flip @ cv2.Rodrigues(np.asarray(wobble, dtype=float))[0]
    return cv2.Rodrigues(rotation)[0].ravel()


def render_patch(patch, span_m, rvec, tvec, camera_matrix,
                 size=IMAGE_SIZE, supersample=3) -> np.ndarray:
    """Warp a planar patch image (centered at the plane origin, x right,
    y up) into a camera view at the given pose. Renders supersampled and
    box-filters down for clean subpixel edges."""
    height_px, width_px = patch.shape[:2]
    span_x, span_y = span_m
    src_to_plane = np.array([
        [span_x / width_px, 0.0, -span_x / 2.0],
        [0.0, -span_y / height_px, span_y / 2.0],
        [0.0, 0.0, 1.0],
    ])
    rotation = cv2.Rodrigues(np.asarray(rvec, dtype=float))[0]
    plane_to_image = camera_matrix @ np.column_stack(
        [rotation[:, 0], rotation[:, 1], np.asarray(tvec, dtype=float)])
    upscale = np.diag([supersample, supersample, 1.0])
    big = (size[0] * supersample, size[1] * supersample)
    canvas = np.full(big[::-1], 255, np.uint8)
    warped = cv2.warpPerspective(
        patch, upscale @ plane_to_image @ src_to_plane, big, canvas,
        flags=cv2.INTER_CUBIC, borderMode=cv2.BORDER_TRANSPARENT)
    return cv2.resize(warped, size, interpolation=cv2.INTER_AREA)


def marker_patch(dictionary, marker_id, edge_length, side_px=480,
                 pad_ratio=0.25):
    """Marker bitmap with a white quiet zone; returns (patch, span in
    meters of the padded patch)."""
    marker = cv2.aruco.generateImageMarker(dictionary, marker_id, side_px)
    pad = int(side_px * pad_ratio)
    patch = np.full((side_px + 2 * pad,) * 2, 255, np.uint8)
    patch[pad:pad + side_px, pad:pad + side_px] = marker
    span = edge_length * (side_px + 2 * pad) / side_px
    return patch, (span, span)


def write_clip(path, frames, fps=30.0) -> None:
    height, width = frames[0].shape[:2]
    writer = cv2.VideoWriter(str(path), cv2.VideoWriter_fourcc(*"MJPG"),
                             fps, (width, height))
    assert writer.isOpened(), "MJPG AVI writer unavailable"
    for frame in frames:
        if frame.ndim == 2:
            frame = cv2.cvtColor(frame, cv2.COLOR_GRAY2BGR)
        writer.write(frame)
    writer.release()


@pytest.fixture
def camera_matrix():
    return intrinsics()


@pytest.fixture
def rng():
    return np.random.default_rng(42)
