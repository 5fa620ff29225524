"""Command-line entry point.

Exit codes: 0 success, 1 a check failed (or the solver failed), 2 configuration error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace

from .coeffs import delta0, derive, validate
from .config import load_config, reference_config
from .errors import ConfigError, NematicError

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2

log = logging.getLogger("nematic2d")


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="JSON run configuration (default: the bundled reference config)")
    common.add_argument("--out", metavar="DIR",
                        help="output directory (fallback: $ELS_OUT_DIR, then outputs.out_dir, then runs/<mode>)")
    common.add_argument("--seed", type=int, help="override initial_data.seed")
    common.add_argument("--threads", type=int, default=1,
                        help="run independent twins or sweep children concurrently (default 1)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="nematic2d",
                                     description="2D Ericksen-Leslie nematic simulator and verification harness")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check coefficients, print delta0 and mu_floor")
    sub.add_parser("simulate", parents=[common], help="run one trajectory; CSV, checkpoints, energy plot")
    twin = sub.add_parser("twin", parents=[common], help="twin runs and the Gronwall test")
    twin.add_argument("--epsilon", type=float, action="append",
                      help="perturbation size (repeatable; replaces the configured list)")
    twin.add_argument("--cap", type=float, help="fixed C_cap instead of the reference-run rule")
    sub.add_parser("identities", parents=[common], help="identity and bound suite on the initial state")
    sweep = sub.add_parser("sweep", parents=[common], help="child runs over the configured sweep axis")
    sweep.add_argument("--epsilon", type=float, action="append",
                       help="perturbation size for twin children (repeatable)")
    plot = sub.add_parser("plot", help="render CSV series (or run directories) to SVG")
    plot.add_argument("paths", nargs="+", help="steps.csv / twin.csv files or run directories")
    plot.add_argument("--out", metavar="PATH", help="output SVG (single input) or directory")
    return parser


def _load(args):
    cfg = load_config(args.config) if args.config else reference_config()
    if args.seed is not None:
        cfg = replace(cfg, initial=replace(cfg.initial, seed=args.seed))
    if getattr(args, "epsilon", None):
        cfg = replace(cfg, twin=replace(cfg.twin, epsilons=tuple(args.epsilon)))
    return cfg


def _out_dir(args, cfg, mode) -> str:
    return args.out or os.environ.get("ELS_OUT_DIR") or cfg.outputs.out_dir or os.path.join("runs", mode)


def _cmd_validate(args) -> int:
    cfg = _load(args)
    report = validate(cfg.leslie, cfg.frank)
    print(report.format())
    d = derive(cfg.leslie, cfg.frank)
    print(f"delta0   = {delta0(cfg.leslie, cfg.frank, cfg.c0_abs):.12g}  (c0_abs = {cfg.c0_abs:g})")
    print(f"delta    = {d.delta:.12g}")
    print(f"mu_floor = {d.mu_floor:.12g}")
    print(f"c0       = {d.c0_gronwall:.12g}")
    return EXIT_OK if report.ok else EXIT_FAILED


def _cmd_run(args, mode) -> int:
    from .harness import run_mode

    cfg = _load(args)
    out = _out_dir(args, cfg, mode)
    kwargs = {"threads": max(1, args.threads)}
    if mode == "twin" and args.cap is not None:
        kwargs["C_cap"] = args.cap
    outcome = run_mode(cfg, out, mode=mode, **kwargs)
    if mode == "identities":
        print(outcome.report.table())
    elif mode == "twin":
        for r in outcome.runs:
            print(f"eps={r.epsilon:.1e}  Phi0={r.phi0:.4e}  Phi_end={r.phi_end:.4e}  "
                  f"C_eff={r.C_eff:+.4f}  {'pass' if r.passed else 'FAIL'}")
        print(f"C_cap={outcome.C_cap:.4f}  curve spread={outcome.spread:.3e} (tol {outcome.spread_tol:g})")
    elif mode == "sweep":
        for label, _, child in outcome.children:
            print(f"{label:<20} {'pass' if child.passed else 'FAIL'}  {child.detail}")
    else:
        print(outcome.detail)
    print(f"{'PASS' if outcome.passed else 'FAIL'}  {mode}  -> {out}")
    return EXIT_OK if outcome.passed else EXIT_FAILED


def _cmd_plot(args) -> int:
    from .plotting import plot_csv

    inputs = []
    for p in args.paths:
        if os.path.isdir(p):
            for root, _, files in sorted(os.walk(p)):
                inputs += [os.path.join(root, f) for f in sorted(files)
                           if f in ("steps.csv", "twin.csv")]
        else:
            inputs.append(p)
    if not inputs:
        print("no step or twin CSV files found", file=sys.stderr)
        return EXIT_FAILED
    for path in inputs:
        if args.out and len(inputs) == 1 and args.out.endswith(".svg"):
            target = args.out
        elif args.out:
            rel = os.path.splitext(os.path.relpath(path))[0].replace(os.sep, "_").lstrip("._")
            target = os.path.join(args.out, rel + ".svg")
        else:
            target = os.path.splitext(path)[0] + ".svg"
        print(plot_csv(path, target))
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "plot":
            return _cmd_plot(args)
        return _cmd_run(args, args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NematicError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
