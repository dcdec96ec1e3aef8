"""Command-line front end.

Exit codes: 0 success, 2 bad arguments or unreadable/invalid files,
3 numeric or contract failure during computation. JSON results go to
stdout; diagnostics go to stderr. Output files are written atomically.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io
from .flow import extract_time_series
from .leakage import build_leakage_model
from .model import CineLoop, DegenerateReferenceError, LoadError, PipelineConfig
from .phantom import generate, load_spec, save_ground_truth
from .pipeline import default_evaluation_index, evaluate, input_window_of, run_pipeline

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COMPUTE = 3


def _pipeline_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--method", choices=["stat", "minip", "perip", "none"], default="stat")
    parser.add_argument("--alpha", type=float, default=2.7)
    parser.add_argument("--window", type=int, default=20)
    parser.add_argument("--percentile", type=float, default=20.0)
    parser.add_argument("--closure-radius", type=int, default=2)
    parser.add_argument("--no-leakage", action="store_true", help="skip leakage-model subtraction")
    parser.add_argument("--average-frames", type=int, default=1,
                        help="average this many consecutive output frames for metrics")


def _config_from_args(args) -> PipelineConfig:
    return PipelineConfig(
        method=args.method,
        alpha=args.alpha,
        window_w=args.window,
        percentile_p=args.percentile,
        closure_radius=args.closure_radius,
        leakage_removal=not args.no_leakage,
        average_frames=getattr(args, "average_frames", 1),
    )


def _load_loop(path) -> CineLoop:
    return io.load_cine_loop(path)


def cmd_enhance(args) -> int:
    loop = _load_loop(args.input)
    config = _config_from_args(args)
    model = build_leakage_model(loop)
    frames = run_pipeline(loop, config, model=model)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    bit_depth = args.bit_depth
    names = []
    for i in range(frames.shape[0]):
        name = f"enhanced_{i:04d}.pgm"
        io.save_frame(frames[i], out_dir / name, bit_depth)
        names.append(name)
    k = default_evaluation_index(loop, config)
    report = {
        "config": config.to_dict(),
        "spread_ratio": model.spread_ratio,
        "evaluation_index": k,
        "evaluation_input_window": list(input_window_of(k, config)),
        "n_input_frames": loop.n_frames,
        "n_output_frames": frames.shape[0],
        "bit_depth": bit_depth,
        "frames": names,
    }
    io.write_json_atomic(out_dir / "report.json", report)
    print(json.dumps({"out": str(out_dir), "n_output_frames": frames.shape[0]}))
    return EXIT_OK


def cmd_quality(args) -> int:
    loop = _load_loop(args.input)
    model = build_leakage_model(loop)
    totals = [float(frame.sum()) for frame in loop.frames]
    print(json.dumps({"spread_ratio": model.spread_ratio, "per_frame_totals": totals}))
    return EXIT_OK


def cmd_metrics(args) -> int:
    loop = _load_loop(args.input)
    config = _config_from_args(args)
    rois = io.load_rois(args.roi, loop.width, loop.height)
    try:
        report = evaluate(
            loop,
            config,
            rois,
            evaluation_index=args.eval_index,
            baseline=args.baseline,
        )
    except KeyError as exc:
        raise LoadError(f"roi file has no {exc.args[0]!r} entry") from None
    text = json.dumps(report.to_dict(), indent=2)
    if args.out:
        io.write_json_atomic(args.out, report.to_dict())
    print(text)
    return EXIT_OK


def cmd_phantom(args) -> int:
    spec = load_spec(args.spec)
    if args.seed is not None:
        spec = spec.with_seed(args.seed)
    loop, truth = generate(spec)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = io.save_cine_loop(loop, out_dir, bit_depth=args.bit_depth)
    summary_path = save_ground_truth(truth, loop, out_dir)
    io.write_json_atomic(out_dir / "spec.json", spec.to_dict())
    print(json.dumps({
        "manifest": str(manifest_path),
        "truth_summary": str(summary_path),
        "n_frames": loop.n_frames,
        "seed": spec.seed,
    }))
    return EXIT_OK


def cmd_timeseries(args) -> int:
    loop = _load_loop(args.input)
    pixel = None
    roi_mask = None
    if (args.pixel is None) == (args.roi_label is None):
        raise LoadError("exactly one of --pixel or --roi-label is required")
    if args.pixel is not None:
        try:
            x_str, y_str = args.pixel.split(",")
            pixel = (int(x_str), int(y_str))
        except ValueError:
            raise LoadError(f"--pixel expects x,y integers, got {args.pixel!r}") from None
    else:
        if not args.roi:
            raise LoadError("--roi-label requires --roi <file>")
        rois = io.load_rois(args.roi, loop.width, loop.height)
        try:
            roi_mask = rois.get(args.roi_label).mask
        except KeyError:
            raise LoadError(f"roi file has no {args.roi_label!r} entry") from None
    try:
        series = extract_time_series(
            loop,
            pixel=pixel,
            roi_mask=roi_mask,
            method=args.method,
            spec=args.window,
            alpha=args.alpha,
            percentile_p=args.percentile,
        )
    except ValueError as exc:
        raise LoadError(str(exc)) from None
    csv_text = io.format_time_series_csv(series)
    if args.out:
        io.write_time_series_csv(series, args.out)
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(Path(args.data_root))
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except (OSError, SystemExit) as exc:
        if isinstance(exc, SystemExit) and not exc.code:
            return EXIT_OK
        print(f"error: cannot serve on port {args.port}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mceus", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enhance", help="run the enhancement pipeline over a loop")
    p.add_argument("--input", required=True, help="loop manifest JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--bit-depth", type=int, choices=[8, 16], default=16)
    _pipeline_flags(p)
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("quality", help="spread ratio and per-frame intensity totals")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_quality)

    p = sub.add_parser("metrics", help="lesion/normal contrast metrics")
    p.add_argument("--input", required=True)
    p.add_argument("--roi", required=True, help="ROI polygon JSON")
    p.add_argument("--eval-index", type=int, default=None)
    p.add_argument("--baseline", choices=["none", "raw"], default="none")
    p.add_argument("--out", default=None, help="also write the report JSON here")
    _pipeline_flags(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("phantom", help="generate a synthetic loop with ground truth")
    p.add_argument("--spec", required=True, help="phantom spec JSON")
    p.add_argument("--seed", type=int, default=None, help="override the spec's seed")
    p.add_argument("--out", required=True)
    p.add_argument("--bit-depth", type=int, choices=[8, 16], default=16)
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("timeseries", help="per-pixel or per-ROI intensity series as CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--pixel", default=None, help="x,y")
    p.add_argument("--roi", default=None, help="ROI polygon JSON")
    p.add_argument("--roi-label", default=None)
    p.add_argument("--out", default=None, help="write CSV here instead of stdout")
    p.add_argument("--method", choices=["stat", "minip", "perip", "none"], default="stat")
    p.add_argument("--alpha", type=float, default=2.7)
    p.add_argument("--window", type=int, default=20)
    p.add_argument("--percentile", type=float, default=20.0)
    p.set_defaults(func=cmd_timeseries)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-root", required=True)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegenerateReferenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except (LoadError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
