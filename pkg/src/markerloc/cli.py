"""Command-line entry points wiring the pipeline end to end.

Subcommands: simulate, annotate, evaluate, sweep, sync-detect. All file
formats are the versioned line-delimited texts of dataset_io, so simulated
and real recordings are interchangeable.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import dataset_io, plots, simulator
from .errors import MarkerlocError
from .evaluation import SweepDataset, deviation_report, parameter_sweep
from .pipeline import PipelineConfig, run_pipeline
from .sync import align_clocks, annotate, detect_cover_event

log = logging.getLogger(__name__)


def _int_or_none(text: str):
    return None if text.lower() == "none" else int(text)


def _float_or_none(text: str):
    return None if text.lower() == "none" else float(text)


def _value_list(parse_one):
    def convert(text: str):
        return [parse_one(part) for part in text.split(",") if part != ""]
    return convert


def _band(text: str):
    low, high = (float(part) for part in text.split(":"))
    return (low, high)


def _interval(text: str):
    t0, t1 = (float(part) for part in text.split(":"))
    return (t0, t1)


def _add_pipeline_flags(parser):
    parser.add_argument("--frame-window", "-F", type=int, default=None,
                        help="frames per batch (default 15)")
    parser.add_argument("--closest", "-C", type=_int_or_none, default=None,
                        help="close-marker selection count, or 'none' (default 20)")
    parser.add_argument("--survivors", "-U", type=_int_or_none, default=None,
                        help="outlier-elimination survivor count, or 'none' (default 10)")
    parser.add_argument("-q", type=_float_or_none, default=None,
                        help="measurement noise multiplier, or 'none' to skip "
                             "filtering (default 0.2, recommended 0.1-0.2)")
    parser.add_argument("-r", type=float, default=None,
                        help="transition noise multiplier (default 0.01)")


def _resolve(args_value, config, key, fallback, convert):
    if args_value is not None:
        return args_value
    if config is not None and key in config:
        return convert(config[key])
    return fallback


def _cmd_simulate(args) -> int:
    waypoints = {
        "straight": simulator.straight_waypoints,
        "rectangle": simulator.rectangle_waypoints,
        "zigzag": simulator.zigzag_waypoints,
    }[args.path]()
    spec = simulator.TrajectorySpec(
        waypoints=waypoints, speed=args.speed, fps=args.fps,
        heading=args.heading, bundle_height=args.bundle_height,
    )
    if args.noise == "default":
        noise = simulator.NoiseModel(
            translation_sigma=simulator.DEFAULT_NOISE.translation_sigma,
            distance_growth=simulator.DEFAULT_NOISE.distance_growth,
            rotation_sigma=simulator.DEFAULT_NOISE.rotation_sigma,
            outlier_probability=simulator.DEFAULT_NOISE.outlier_probability,
            outlier_mode=simulator.DEFAULT_NOISE.outlier_mode,
            seed=args.seed,
        )
    else:
        noise = simulator.NoiseModel(seed=args.seed)
    if args.noise_base is not None:
        noise.translation_sigma = args.noise_base
    if args.noise_growth is not None:
        noise.distance_growth = args.noise_growth
    if args.noise_rotation is not None:
        noise.rotation_sigma = args.noise_rotation
    if args.outlier_prob is not None:
        noise.outlier_probability = args.outlier_prob
    noise.outlier_mode = args.outlier_mode

    truth = simulator.gen_trajectory(spec)
    markers = simulator.default_marker_map()
    observations = simulator.gen_observations(
        truth, markers, fov=args.fov, max_range=args.max_range, noise=noise
    )
    rssi_model = simulator.RssiModel(
        reference_power=args.rssi_ref,
        path_loss_exponent=args.rssi_exponent,
        shadowing_sigma=args.rssi_shadow,
        sample_rate=args.rssi_rate,
        cover_interval=args.cover,
        cover_attenuation=args.cover_atten,
        seed=args.seed,
    )
    rssi = simulator.gen_rssi(truth, simulator.default_sensors(), rssi_model)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset_io.write_marker_map(out_dir / "markers.txt", markers)
    dataset_io.write_detections(out_dir / "detections.txt", observations)
    dataset_io.write_rssi_log(out_dir / "rssi.txt", rssi)
    dataset_io.write_trajectory(out_dir / "truth.txt", truth)
    dataset_io.write_paths(out_dir / "paths.txt", _segments_from_truth(spec, truth))
    print(f"simulated {len(truth)} poses, {len(observations)} detections, "
          f"{len(rssi)} rssi samples -> {out_dir}")
    return 0


def _segments_from_truth(spec, truth):
    """Per-leg segments timed by the constant-speed schedule; the final leg
    ends at the last sampled pose so a perfect tracker takes zero drag."""
    from .evaluation import PathSegment

    points = [np.asarray(w, dtype=float) for w in spec.waypoints]
    points = [
        np.array([p[0], p[1], spec.bundle_height]) if p.size == 2 else p
        for p in points
    ]
    lengths = [float(np.linalg.norm(b - a)) for a, b in zip(points, points[1:])]
    boundaries = np.concatenate([[0.0], np.cumsum(lengths)]) / spec.speed
    t_last = truth[-1].timestamp
    segments = []
    for i in range(len(lengths)):
        start_t, end_t = float(boundaries[i]), float(boundaries[i + 1])
        start, end = points[i], points[i + 1]
        if i == len(lengths) - 1:
            end_t = t_last
            end = truth[-1].position
        segments.append(PathSegment(start, end, start_t, end_t))
    return segments


def _cmd_annotate(args) -> int:
    config = dataset_io.read_key_values(args.config) if args.config else None
    detections_path = _resolve(args.detections, config, "detections", None, str)
    rssi_path = _resolve(args.rssi, config, "rssi", None, str)
    markers_path = _resolve(args.markers, config, "markers", None, str)
    out_path = _resolve(args.out, config, "out", None, str)
    for name, value in (("detections", detections_path), ("rssi", rssi_path),
                        ("markers", markers_path), ("out", out_path)):
        if value is None:
            raise ValueError(f"--{name} is required (flag or config)")

    pipeline_config = PipelineConfig(
        frame_window=_resolve(args.frame_window, config, "frame_window", 15, int),
        closest_count=_resolve(args.closest, config, "closest", 20, _int_or_none),
        survivors=_resolve(args.survivors, config, "survivors", 10, _int_or_none),
        q=_resolve(args.q, config, "q", 0.2, _float_or_none),
        r=_resolve(args.r, config, "r", 0.01, float),
    )

    observations = dataset_io.read_detections(detections_path)
    markers = dataset_io.read_marker_map(markers_path)
    rssi = dataset_io.read_rssi_log(rssi_path)
    result = run_pipeline(observations, markers, pipeline_config)
    if not result.trajectory:
        raise ValueError("annotate requires a filtered trajectory (q must not be 'none')")

    offset = _resolve_offset(args, rssi)
    annotation = annotate(rssi, result.trajectory, offset=offset)
    dataset_io.write_annotated(out_path, annotation.samples)
    if args.trajectory_out:
        dataset_io.write_trajectory(args.trajectory_out, result.trajectory)
    print(f"annotated {len(annotation.samples)} samples "
          f"({annotation.dropped} outside span dropped, offset {offset:g} s) "
          f"-> {out_path}")
    return 0


def _resolve_offset(args, rssi) -> float:
    if args.offset is not None:
        return args.offset
    if args.sync_at is not None:
        if args.video_release is None:
            raise ValueError("--sync-at needs --video-release")
        return align_clocks(args.video_release, args.sync_at)
    if args.sync_auto:
        if args.video_release is None:
            raise ValueError("--sync-auto needs --video-release")
        event = detect_cover_event(rssi, strong_band=args.strong_band,
                                   window=args.window)
        log.info("detected cover release at %.3f s (confidence %.2f)",
                 event.release_time, event.confidence)
        return align_clocks(args.video_release, event.release_time)
    return 0.0


def _print_report(report, label="") -> None:
    prefix = f"{label}: " if label else ""
    print(f"{prefix}n={report.distances.size} median={report.median:.6f} "
          f"mean={report.mean:.6f} drag={report.drag_penalty:.6f} "
          f"penalized_median={report.penalized_median:.6f}")


_TABLE_HEADER = ("closest\tsurvivors\tq\tr\tn\tmedian\tmean\tdrag"
                 "\tpenalized_median\tpenalized_mean\n")


def _table_row(report) -> str:
    cell = report.params
    values = ["-", "-", "-", "-"]
    if cell is not None:
        values = [
            "-" if cell.closest_count is None else str(cell.closest_count),
            "-" if cell.survivors is None else str(cell.survivors),
            "-" if cell.q is None else repr(cell.q),
            repr(cell.r),
        ]
    return "\t".join(values + [
        str(report.distances.size),
        repr(report.median),
        repr(report.mean),
        repr(report.drag_penalty),
        repr(report.penalized_median),
        repr(report.penalized_mean),
    ]) + "\n"


def _cmd_evaluate(args) -> int:
    trajectory = dataset_io.read_trajectory(args.trajectory)
    segments = dataset_io.read_paths(args.paths)
    include_drag = args.penalize and any(s.end_time is not None for s in segments)
    report = deviation_report(trajectory, segments, planar=args.planar,
                              include_drag=include_drag)
    _print_report(report)
    if args.table:
        with open(args.table, "w", encoding="utf-8") as handle:
            handle.write(_TABLE_HEADER)
            handle.write(_table_row(report))
    if args.plot:
        plot_config = (dataset_io.read_key_values(args.plot_config)
                       if args.plot_config else None)
        plots.plot_map(trajectory, segments, args.plot, plot_config)
    return 0


def _cmd_sweep(args) -> int:
    dataset = SweepDataset(
        observations=dataset_io.read_detections(args.detections),
        markers=dataset_io.read_marker_map(args.markers),
        frame_window=args.frame_window if args.frame_window is not None else 15,
        segments=dataset_io.read_paths(args.paths),
    )
    grid = {
        "closest_count": args.closest if args.closest else [None],
        "survivors": args.survivors if args.survivors else [None],
        "q": args.q if args.q else [None],
        "r": args.r if args.r else [0.01],
    }
    reports = parameter_sweep(dataset, grid, planar=args.planar)
    for report in reports:
        _print_report(report, label=plots.cell_label(report.params))
    if args.table:
        with open(args.table, "w", encoding="utf-8") as handle:
            handle.write(_TABLE_HEADER)
            for report in reports:
                handle.write(_table_row(report))
    if args.plot:
        plots.plot_sweep(reports, args.plot)
    return 0


def _cmd_sync_detect(args) -> int:
    rssi = dataset_io.read_rssi_log(args.rssi)
    event = detect_cover_event(rssi, strong_band=args.strong_band,
                               window=args.window)
    print(f"release_time={event.release_time!r} cover_time={event.cover_time!r} "
          f"confidence={event.confidence:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="markerloc",
        description="Marker-based ground-truth trajectories and RSSI annotation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="generate a synthetic dataset")
    p_sim.add_argument("--out-dir", required=True)
    p_sim.add_argument("--path", choices=("straight", "rectangle", "zigzag"),
                       default="straight")
    p_sim.add_argument("--speed", type=float, default=0.35)
    p_sim.add_argument("--fps", type=float, default=60.0)
    p_sim.add_argument("--heading", choices=("fixed", "along-path"),
                       default="fixed")
    p_sim.add_argument("--bundle-height", type=float, default=2.0)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--noise", choices=("none", "default"), default="none")
    p_sim.add_argument("--noise-base", type=float, default=None)
    p_sim.add_argument("--noise-growth", type=float, default=None)
    p_sim.add_argument("--noise-rotation", type=float, default=None)
    p_sim.add_argument("--outlier-prob", type=float, default=None)
    p_sim.add_argument("--outlier-mode",
                       choices=("axis-inversion", "uniform-jump"),
                       default="axis-inversion")
    p_sim.add_argument("--fov", type=float, default=2.0)
    p_sim.add_argument("--max-range", type=float, default=8.0)
    p_sim.add_argument("--rssi-rate", type=float, default=2.0)
    p_sim.add_argument("--rssi-ref", type=float, default=-60.0)
    p_sim.add_argument("--rssi-exponent", type=float, default=2.0)
    p_sim.add_argument("--rssi-shadow", type=float, default=3.0)
    p_sim.add_argument("--cover", type=_interval, default=None,
                       metavar="T0:T1")
    p_sim.add_argument("--cover-atten", type=float, default=25.0)
    p_sim.set_defaults(func=_cmd_simulate)

    p_ann = sub.add_parser("annotate",
                           help="detections + rssi + markers -> annotated file")
    p_ann.add_argument("--detections")
    p_ann.add_argument("--rssi")
    p_ann.add_argument("--markers")
    p_ann.add_argument("--out")
    p_ann.add_argument("--config", help="run-config key-value file")
    _add_pipeline_flags(p_ann)
    p_ann.add_argument("--offset", type=float, default=None,
                       help="explicit video-to-RSSI clock offset in seconds")
    p_ann.add_argument("--sync-at", type=float, default=None,
                       help="manual RSSI-clock release timestamp")
    p_ann.add_argument("--sync-auto", action="store_true",
                       help="detect the cover release in the RSSI stream")
    p_ann.add_argument("--video-release", type=float, default=None,
                       help="video-clock release timestamp")
    p_ann.add_argument("--strong-band", type=_band, default=(-85.0, -65.0),
                       metavar="LO:HI")
    p_ann.add_argument("--window", type=float, default=1.0)
    p_ann.add_argument("--trajectory-out")
    p_ann.set_defaults(func=_cmd_annotate)

    p_eval = sub.add_parser("evaluate",
                            help="score a trajectory against path segments")
    p_eval.add_argument("--trajectory", required=True)
    p_eval.add_argument("--paths", required=True)
    p_eval.add_argument("--planar", action="store_true",
                        help="project deviations to the floor plane")
    p_eval.add_argument("--penalize", action="store_true",
                        help="accumulate drag penalties from timed segments")
    p_eval.add_argument("--table")
    p_eval.add_argument("--plot")
    p_eval.add_argument("--plot-config")
    p_eval.set_defaults(func=_cmd_evaluate)

    p_sweep = sub.add_parser("sweep", help="grid of pipeline parameters")
    p_sweep.add_argument("--detections", required=True)
    p_sweep.add_argument("--markers", required=True)
    p_sweep.add_argument("--paths", required=True)
    p_sweep.add_argument("--frame-window", "-F", type=int, default=None)
    p_sweep.add_argument("--closest", "-C", type=_value_list(_int_or_none),
                         default=None, metavar="LIST")
    p_sweep.add_argument("--survivors", "-U", type=_value_list(_int_or_none),
                         default=None, metavar="LIST")
    p_sweep.add_argument("-q", type=_value_list(_float_or_none), default=None,
                         metavar="LIST")
    p_sweep.add_argument("-r", type=_value_list(float), default=None,
                         metavar="LIST")
    p_sweep.add_argument("--planar", action="store_true")
    p_sweep.add_argument("--table")
    p_sweep.add_argument("--plot")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_sync = sub.add_parser("sync-detect",
                            help="locate the cover release in an RSSI log")
    p_sync.add_argument("--rssi", required=True)
    p_sync.add_argument("--strong-band", type=_band, default=(-85.0, -65.0),
                        metavar="LO:HI")
    p_sync.add_argument("--window", type=float, default=1.0)
    p_sync.set_defaults(func=_cmd_sync_detect)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MarkerlocError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
