"""Command-line entry point: ``biphoton simulate|validate|metrics|study``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments, io
from .core import ConfigError, validate_config
from .presets import UnknownPreset

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE = 0, 1, 2

SCENARIO_NAMES = {"single-slit": "single_slit", "strekalov": "strekalov", "kim-shih": "kim_shih"}
MODE_NAMES = {"closed": "closed_form", "numeric": "numeric"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _build_parser():
    parser = _Parser(prog="biphoton", description="Biphoton ghost-slit experiment simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def source(p, required=True):
        g = p.add_mutually_exclusive_group(required=required)
        g.add_argument("--preset", help="kim-shih or strekalov")
        g.add_argument("--config", type=Path, help="config file ([source]/[geometry]/[left]/[scan])")

    sim = sub.add_parser("simulate", help="run one scenario and write CSV (and SVG)")
    source(sim)
    sim.add_argument("--scenario", choices=sorted(SCENARIO_NAMES), default="kim-shih")
    sim.add_argument("--mode", choices=sorted(MODE_NAMES), default="closed")
    sim.add_argument("--out-dir", type=Path, default=Path("out"))
    sim.add_argument("--svg", action="store_true", help="also write an SVG figure")
    sim.add_argument("--left-y", type=float, help="override the fixed left detector position (mm)")
    sim.add_argument("--drop-gaussian", action="store_true", help="strekalov: omit the source envelope")

    val = sub.add_parser("validate", help="run the oracle and invariant suite")
    source(val, required=False)
    val.add_argument("--tolerance", type=float, default=1e-6)
    val.add_argument(
        "--perturb",
        choices=["exponent-sign"],
        help="inject a known defect into the closed-form rate; validation must then fail",
    )

    met = sub.add_parser("metrics", help="print width and uncertainty metrics")
    source(met)

    study = sub.add_parser("study", help="Kim-Shih rate for several packet parameters a")
    source(study)
    study.add_argument("--a-values", required=True, help="comma separated, in mm")
    study.add_argument("--out-dir", type=Path)
    study.add_argument("--svg", action="store_true")
    return parser


def _load(args):
    if getattr(args, "config", None) is not None:
        return validate_config(io.load_config(args.config))
    return validate_config(io.load_config(args.preset or "kim-shih"))


def _report(result, out):
    m = result.metrics
    print(f"scenario: {result.scenario} ({result.label})", file=out)
    print(f"  peak_location_mm: {m.peak_location:.6g}", file=out)
    print(f"  fwhm_mm: {m.fwhm:.6g}", file=out)
    print(f"  delta_p_hbar_per_mm: {m.delta_p:.6g}", file=out)
    print(f"  delta_y_mm: {m.delta_y:.6g}  (slit half-width d/2)", file=out)
    print(f"  product_hbar: {m.product_hbar:.6g}", file=out)
    if "argument_constant" in result.provenance:
        p = result.provenance
        print(
            f"  calibrated argument constant: {p['argument_constant']} "
            f"(scale {p['calibration_scale']:.10g}, max deviation {p['calibration_deviation']:.3g})",
            file=out,
        )


def _warn(cfg):
    for w in cfg.warnings:
        print(f"warning: {w}", file=sys.stderr)


def cmd_simulate(args, out):
    cfg = _load(args)
    _warn(cfg)
    if args.left_y is not None:
        cfg = validate_config(cfg.config.with_(left_detector_y=args.left_y))
    scenario = SCENARIO_NAMES[args.scenario]
    mode = MODE_NAMES[args.mode]
    extra = []
    if scenario == "single_slit":
        result = experiments.run_single_slit(cfg)
    elif scenario == "strekalov":
        result = experiments.run_strekalov_scan(cfg, drop_gaussian=args.drop_gaussian)
        if cfg.left_detector_y != 0:
            extra = [experiments.run_strekalov_scan(cfg, drop_gaussian=args.drop_gaussian, left_detector_y=0.0)]
    else:
        result = experiments.run_kim_shih_scan(cfg, mode)
        extra = [experiments.run_single_slit(cfg)]

    args.out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{cfg.name}_{args.scenario}" + (f"_{args.mode}" if scenario == "kim_shih" else "")
    csv_path = args.out_dir / f"{stem}.csv"
    io.write_csv(result, csv_path)
    print(f"wrote {csv_path}", file=out)
    if args.svg:
        svg_path = args.out_dir / f"{stem}.svg"
        scale = "raw" if scenario == "strekalov" else "peak"
        io.emit_svg_plot([result, *extra], svg_path, overlay=True, scale=scale)
        print(f"wrote {svg_path}", file=out)
    _report(result, out)
    return EXIT_OK


def cmd_validate(args, out):
    from .validation import run_validation

    cfg = _load(args)
    sign = 1.0 if args.perturb == "exponent-sign" else -1.0
    checks = run_validation(cfg, tolerance=args.tolerance, exponent_sign=sign)
    for c in checks:
        print(c.line(), file=out)
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed", file=out)
    return EXIT_OK if failed == 0 else EXIT_VALIDATION


def cmd_metrics(args, out):
    cfg = _load(args)
    _warn(cfg)
    for result in (
        experiments.run_single_slit(cfg),
        experiments.run_strekalov_scan(cfg),
        experiments.run_kim_shih_scan(cfg),
    ):
        _report(result, out)
    return EXIT_OK


def cmd_study(args, out):
    cfg = _load(args)
    try:
        a_values = [float(v) for v in args.a_values.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--a-values: cannot parse {args.a_values!r}") from None
    if not a_values or any(a <= 0 for a in a_values):
        raise UsageError("--a-values must be positive numbers")
    results = experiments.beam_width_limit_study(cfg, a_values)
    print("a_mm,fwhm_mm,delta_p_hbar_per_mm", file=out)
    for a, r in zip(a_values, results):
        print(f"{a:.6g},{r.metrics.fwhm:.6g},{r.metrics.delta_p:.6g}", file=out)
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        for k, r in enumerate(results):
            io.write_csv(r, args.out_dir / f"{cfg.name}_study_{k}.csv")
        if args.svg:
            io.emit_svg_plot(results, args.out_dir / f"{cfg.name}_study.svg", overlay=True, scale="peak")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "validate": cmd_validate, "metrics": cmd_metrics, "study": cmd_study}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = _build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except (UsageError, UnknownPreset, ConfigError, io.ParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
