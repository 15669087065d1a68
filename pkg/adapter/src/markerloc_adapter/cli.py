"""Command line: video -> detections file, chart views -> camera profile."""

from __future__ import annotations

import argparse
import sys

from .calibrate import MIN_VIEWS, calibrate, make_board
from .detect import DEFAULT_DICTIONARY, DICTIONARIES, detect_video
from .errors import AdapterError
from .profile import read_profile, write_profile


def _squares(text: str):
    x, y = (int(part) for part in text.lower().split("x"))
    return (x, y)


def _cmd_detect(args) -> int:
    profile = read_profile(args.profile)
    summary = detect_video(args.video, profile, args.edge, args.out,
                           stride=args.stride, dictionary=args.dictionary)
    print(f"processed {summary.frames} frames, "
          f"{summary.detections} detections -> {args.out}")
    return 0


def _cmd_calibrate(args) -> int:
    board = make_board(args.squares, args.square, args.marker,
                       args.dictionary)
    result = calibrate(args.source, board=board, fps=args.fps,
                       camera_id=args.camera_id,
                       upside_down=args.upside_down,
                       min_views=args.min_views)
    write_profile(args.out, result.profile)
    fx = result.profile.camera_matrix[0, 0]
    fy = result.profile.camera_matrix[1, 1]
    print(f"calibrated from {result.views_used} views: fx={fx:.2f} "
          f"fy={fy:.2f} reprojection {result.reprojection_error:.3f} px "
          f"-> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="markerloc-adapter",
        description="ArUco detection and Charuco calibration for markerloc",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_detect = sub.add_parser("detect",
                              help="video -> markerloc detections file")
    p_detect.add_argument("--video", required=True)
    p_detect.add_argument("--profile", required=True,
                          help="camera profile from `calibrate`")
    p_detect.add_argument("--edge", type=float, default=0.3,
                          help="printed marker edge length in meters")
    p_detect.add_argument("--out", required=True)
    p_detect.add_argument("--stride", type=int, default=1,
                          help="process every Nth frame")
    p_detect.add_argument("--dictionary", choices=sorted(DICTIONARIES),
                          default=DEFAULT_DICTIONARY)
    p_detect.set_defaults(func=_cmd_detect)

    p_cal = sub.add_parser("calibrate",
                           help="chart video/images -> camera profile")
    p_cal.add_argument("--source", required=True,
                       help="video file or directory of chart images")
    p_cal.add_argument("--out", required=True)
    p_cal.add_argument("--squares", type=_squares, default=(8, 6),
                       metavar="XxY")
    p_cal.add_argument("--square", type=float, default=0.05,
                       help="chessboard square side, meters")
    p_cal.add_argument("--marker", type=float, default=0.037,
                       help="embedded marker side, meters")
    p_cal.add_argument("--dictionary", choices=sorted(DICTIONARIES),
                       default=DEFAULT_DICTIONARY)
    p_cal.add_argument("--fps", type=float, default=60.0)
    p_cal.add_argument("--camera-id", type=int, default=0)
    p_cal.add_argument("--upside-down", action="store_true")
    p_cal.add_argument("--min-views", type=int, default=MIN_VIEWS)
    p_cal.set_defaults(func=_cmd_calibrate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (AdapterError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
