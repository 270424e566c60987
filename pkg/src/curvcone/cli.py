"""``curvcone`` command-line driver.

Exit status: 0 when every check passes, 1 when a pipeline check fails (the
report is still written), 2 for configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ExperimentConfig
from .errors import ConfigError
from .runner import emit_plotdata, load_report, run

SUBCOMMAND_TASKS = {"curvature": ("curvature",), "cone": ("cone",), "construct": ("thm12", "thm13"), "verify": ("formula_check",)}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curvcone", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("curvature", "curvature tensors of a catalog metric, with space-form checks"),
        ("cone", "classify an ansatz configuration and search for N"),
        ("construct", "run a theorem pipeline (task thm12 or thm13)"),
        ("verify", "conformal transformation formulas against direct recomputation"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="experiment config (JSON)")
        p.add_argument("--out", help="output directory (default: output.dir from the config)")
        p.add_argument("--provider", choices=("taylor", "fd"), help="override the derivative provider")
        p.add_argument("--seed", type=int, help="override the random seed")
        p.add_argument("-v", "--verbose", action="store_true")
    p = sub.add_parser("report", help="re-emit CSV tables from an existing report.json")
    p.add_argument("--report", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help=argparse.SUPPRESS)
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "report":
            emit_plotdata(load_report(args.report), args.out)
            return 0
        cfg = ExperimentConfig.load(args.config)
        allowed = SUBCOMMAND_TASKS[args.command]
        if cfg.task not in allowed:
            if len(allowed) > 1:
                raise ConfigError(f"'{args.command}' needs task {' or '.join(allowed)}, config has {cfg.task!r}")
            cfg.task = allowed[0]
        if args.provider:
            cfg.provider = {"kind": args.provider}
        if args.seed is not None:
            cfg.seed = args.seed
        cfg.validate()
        out = args.out or cfg.output.get("dir", "curvcone-out")
        report = run(cfg, out)
    except ConfigError as exc:
        print(f"curvcone: config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"curvcone: {exc}", file=sys.stderr)
        return 1
    print(f"{report.task} on {report.chart} (n={report.dim}): {report.verdict}")
    for name, ok in report.checks.items():
        print(f"  {'PASS' if ok else 'FAIL'}  {name}")
    if report.N_found is not None:
        print(f"  N found: {report.N_found:.6g}  case: {report.case}")
    print(f"  report: {out}/report.json")
    return 0 if report.verdict == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
