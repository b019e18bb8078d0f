"""Command line for seeded experiment batches.

Exit codes: 0 success, 1 a checked inequality or identity was violated,
2 configuration error (including an infeasible problem size).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ratmax.experiments import COMMANDS, ConfigError, ExperimentConfig, parse_grid, read_config_file, run

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG = 0, 1, 2


def _grid(text):
    try:
        return parse_grid(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; flags given here override it")
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--s-min", type=int)
    common.add_argument("--s-max", type=int)
    common.add_argument("--grid", type=_grid, metavar="L1xL2")
    common.add_argument("--q", type=int, help="override the torus circumference Q")
    common.add_argument("--tau", type=float, help="lacunarity constant")
    common.add_argument("--windows", type=int, help="number of lacunary windows K")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--max-bins", type=int, help="largest admissible L1*L2")

    p = argparse.ArgumentParser(prog="ratmax", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("rm-check", parents=[common], help="random dyadic inequality checks").add_argument(
        "--exhaustive", choices=("none", "01", "pm1"))
    g = sub.add_parser("growth-study", parents=[common], help="operator norm growth over s")
    g.add_argument("--dim", type=int, choices=(1, 2))
    g.add_argument("--ascent-steps", type=int)
    sub.add_parser("fejer-check", parents=[common], help="Fejer combination identity")
    o = sub.add_parser("osc-check", parents=[common], help="oscillation of a 2D array")
    o.add_argument("--input", help=".npy or .csv array; default is the row counterexample")
    o.add_argument("--truncation", type=int)
    s = sub.add_parser("gen-set", parents=[common], help="list the rational frequency sets")
    s.add_argument("--scaled", action="store_true", default=None)
    d = sub.add_parser("decay-check", parents=[common], help="Fejer vs Littlewood-Paley decay")
    d.add_argument("--delta", type=float)
    d.add_argument("--n-max", type=int)
    d.add_argument("--xi-points", type=int)
    return p


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    values = read_config_file(ns.config) if ns.config else {}
    for key, val in vars(ns).items():
        if key in ("command", "config") or val is None:
            continue
        values[key] = val
    values.setdefault("format", "csv")
    return ExperimentConfig(command=ns.command, **values)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        report = run(cfg)
    except (ConfigError, OverflowError, FileNotFoundError) as exc:
        print(f"ratmax: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = report.render(cfg.format)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"ratmax {cfg.command}: {len(report.rows)} rows, {report.violations} violations, "
          f"{report.wall_clock:.2f}s, input {report.input_hash[:12]}", file=sys.stderr)
    return EXIT_VIOLATION if report.violations else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
