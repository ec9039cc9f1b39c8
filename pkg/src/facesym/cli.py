"""Command-line entry point.

Subcommands: score, synthesize, overlay, flow, calibrate, serve. Exit codes:
0 success, 1 pipeline error (stage-labeled message on stderr), 2 usage
error. ``FACESYM_THREADS`` caps the per-pair worker count.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__, media_io, pipeline
from .errors import FacesymError
from .face_regions import RegionConfig
from .flow_engine import FlowParams
from .scoring import ScoreConfig, SymmetryReport


def _add_io_args(parser: argparse.ArgumentParser, out_help: str) -> None:
    parser.add_argument("--in", dest="input_dir", required=True, help="input frame directory")
    parser.add_argument("--out", dest="out", required=True, help=out_help)
    parser.add_argument("--landmarks", required=True, help="68-point landmark JSON for frame 1")
    parser.add_argument("--pattern", default="*", help="filename glob within the input directory")
    parser.add_argument("--region-config", default=None, help="JSON file overriding region margins")


def _add_flow_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--flow-levels", type=int, default=3, help="pyramid levels")
    parser.add_argument("--flow-winsize", type=int, default=15, help="averaging window (odd)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="facesym",
        description="Quantify left/right facial motion asymmetry from frame sequences.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="compute movement and symmetry scores")
    _add_io_args(p_score, "report output file")
    _add_flow_args(p_score)
    p_score.add_argument("--lambda", dest="lambda_", type=float, default=3.8,
                         help="symmetry score coefficient")
    p_score.add_argument("--threshold-factor", type=float, default=6.0,
                         help="noise threshold as a multiple of the mean magnitude")
    p_score.add_argument("--format", choices=("json", "csv"), default=None,
                         help="report format (default: from --out suffix, else json)")

    p_synth = sub.add_parser("synthesize", help="freeze one face half at frame 1")
    _add_io_args(p_synth, "output frame directory")
    p_synth.add_argument("--side", choices=("left", "right"), default="right",
                         help="side to freeze")

    p_overlay = sub.add_parser("overlay", help="render flow-magnitude heatmap overlays")
    _add_io_args(p_overlay, "output image directory")
    _add_flow_args(p_overlay)
    p_overlay.add_argument("--alpha", type=float, default=0.5, help="heatmap blend factor")
    p_overlay.add_argument("--threshold-factor", type=float, default=6.0,
                           help="noise threshold (0 disables)")

    p_flow = sub.add_parser("flow", help="dump per-pair flow fields (Middlebury layout)")
    _add_io_args(p_flow, "output flow directory")
    _add_flow_args(p_flow)

    p_cal = sub.add_parser("calibrate", help="fit lambda from expert-scored samples")
    p_cal.add_argument("--in", dest="input_file", required=True,
                       help="JSON file of [delta_v, expert_score] pairs")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    return parser


def _flow_params(args: argparse.Namespace) -> FlowParams:
    return FlowParams(pyramid_levels=args.flow_levels, avg_window=args.flow_winsize)


def _region_config(args: argparse.Namespace) -> RegionConfig | None:
    if args.region_config is None:
        return None
    return RegionConfig.from_file(args.region_config)


def _print_report(report: SymmetryReport) -> None:
    print(media_io.REPORT_CSV_HEADER.replace(",", "\t"))
    for r in report.regions:
        print("\t".join([r.region, repr(r.v_left), repr(r.v_right),
                         repr(r.delta_v), repr(r.s_s)]))


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "score":
            fmt = args.format or ("csv" if Path(args.out).suffix.lower() == ".csv" else "json")
            report = pipeline.run_score(
                args.input_dir,
                args.landmarks,
                out_file=args.out,
                out_format=fmt,
                config=ScoreConfig(lambda_=args.lambda_, threshold_factor=args.threshold_factor),
                flow_params=_flow_params(args),
                region_config=_region_config(args),
                pattern=args.pattern,
            )
            _print_report(report)
        elif args.command == "synthesize":
            written = pipeline.run_synthesize(
                args.input_dir, args.landmarks, args.out,
                side=args.side,
                region_config=_region_config(args),
                pattern=args.pattern,
            )
            print(f"wrote {len(written)} frames to {args.out}")
        elif args.command == "overlay":
            written = pipeline.run_overlay(
                args.input_dir, args.landmarks, args.out,
                alpha=args.alpha,
                threshold_factor=args.threshold_factor,
                flow_params=_flow_params(args),
                region_config=_region_config(args),
                pattern=args.pattern,
            )
            print(f"wrote {len(written)} overlays to {args.out}")
        elif args.command == "flow":
            written = pipeline.run_flow_dump(
                args.input_dir, args.landmarks, args.out,
                flow_params=_flow_params(args),
                region_config=_region_config(args),
                pattern=args.pattern,
            )
            print(f"wrote {len(written)} flow files to {args.out}")
        elif args.command == "calibrate":
            samples = pipeline.load_calibration_samples(args.input_file)
            lam = pipeline.run_calibrate(samples)
            print(f"lambda = {lam!r}")
        elif args.command == "serve":
            import uvicorn

            from .service.app import create_app

            uvicorn.run(create_app(), host=args.host, port=args.port)
    except FacesymError as exc:
        print(f"facesym: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
