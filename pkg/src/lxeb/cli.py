"""Command-line frontend.

    lxeb run --config lxeb.json [--seed 7] [--trials 200] [--workers 4] [--figures]
    lxeb moments --group unitary --partition 2 --d 4
    lxeb bounds --theorem lindepth --k 1000000 --n 20
    lxeb depth --ensemble 4design --n 16 --epsilon 2^-80
    lxeb sample --n 4 --depth 12 --k 10 --seed 3

Flags given on the command line override values from the config file.
"""

from __future__ import annotations

import argparse
import os
import re
import sys

from . import bounds, moments
from .config import load_config
from .core import bitstring, full_distribution, run_circuit, sample_outcomes
from .ensembles import (
    GATE_KINDS,
    EnsembleSpec,
    build_brickwork,
    required_depth_4design,
    required_depth_coarse,
    required_depth_tdesign,
)
from .errors import CapacityError, ConfigError
from .estimators import DEFAULT_B, lxeb_test
from .experiments import SAMPLING_COUNTER, run_experiment, summary_lines, write_report
from .seeding import SeedPlan, philox_stream

EXIT_CONFIG = 2
EXIT_CAPACITY = 3
WORKERS_ENV = "LXEB_WORKERS"

_POW_RE = re.compile(r"^\s*2\s*\^\s*\(?\s*(-?\d+)\s*\)?\s*$")


def parse_epsilon(text: str) -> float:
    """Float or ``2^-k``."""
    m = _POW_RE.match(text)
    if m:
        return 2.0 ** int(m.group(1))
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad epsilon {text!r}") from None


def _partition(text: str):
    try:
        return moments.parse_partition(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _default_workers():
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return None
    try:
        return max(1, int(raw))
    except ValueError:
        return None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lxeb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a configured Monte Carlo experiment")
    run.add_argument("--config", required=True, help="JSON experiment config")
    run.add_argument("--seed", type=int, help="override master_seed")
    run.add_argument("--trials", type=int, help="override trial count")
    run.add_argument("--workers", type=int, default=_default_workers(),
                     help=f"worker processes (default from ${WORKERS_ENV}, else config)")
    run.add_argument("--k", type=int, help="override samples per trial")
    run.add_argument("--b", type=float, help="override LXEB threshold factor")
    run.add_argument("--n", type=int, help="override qubit count")
    run.add_argument("--depth", help="override depth (integer, '<c>n' or preset)")
    run.add_argument("--output-dir", help="override output directory")
    run.add_argument("--figures", action="store_true", help="also render PNG figures into the output directory")

    mom = sub.add_parser("moments", help="exact Haar output-probability moment")
    mom.add_argument("--group", choices=moments.GROUPS, default="unitary")
    mom.add_argument("--partition", type=_partition, required=True, help="integer partition, e.g. '2,1'")
    mom.add_argument("--d", type=int, required=True, help="Hilbert-space dimension")
    mom.add_argument("--oracle", action="store_true", help="orthogonal only: also evaluate the pair-partition sum")

    bnd = sub.add_parser("bounds", help="LXEB pass-probability guarantee")
    bnd.add_argument("--theorem", choices=bounds.THEOREMS, required=True)
    bnd.add_argument("--k", type=int, required=True)
    bnd.add_argument("--n", type=int, required=True)
    bnd.add_argument("--log-base", choices=("e", "2"), default="e")

    dep = sub.add_parser("depth", help="circuit depth for an approximate design")
    dep.add_argument("--ensemble", choices=("4design", "tdesign", "coarse"), default="4design")
    dep.add_argument("--n", type=int, required=True)
    dep.add_argument("--t", type=int, default=4)
    dep.add_argument("--epsilon", type=parse_epsilon, required=True, help="float or 2^-k")
    dep.add_argument("--constant", type=float, default=1.0, help="big-O constant (illustrative)")

    smp = sub.add_parser("sample", help="sample one brickwork circuit and score it")
    smp.add_argument("--n", type=int, required=True)
    smp.add_argument("--depth", type=int, required=True)
    smp.add_argument("--ensemble", choices=GATE_KINDS, default="haar-unitary")
    smp.add_argument("--k", type=int, default=10)
    smp.add_argument("--seed", type=int, default=0)
    smp.add_argument("--b", type=float, default=DEFAULT_B)
    return parser


def cmd_run(args, out) -> int:
    cfg = load_config(args.config)
    cfg = cfg.with_overrides(master_seed=args.seed, trials=args.trials, workers=args.workers,
                             k=args.k, b=args.b, output_dir=args.output_dir, n=args.n, depth=args.depth)
    report = run_experiment(cfg)
    paths = write_report(report, cfg.output_dir)
    if args.figures:
        from .plotting import render_figures
        for p in render_figures(report, cfg.output_dir):
            print(f"figure={p}", file=out)
    for line in summary_lines(report):
        print(line, file=out)
    print(f"report={paths['report']}", file=out)
    print(f"trials_csv={paths['trials']}", file=out)
    return 0


def cmd_moments(args, out) -> int:
    value = moments.haar_moment(args.partition, args.d, args.group)
    print(f"{value.numerator}/{value.denominator} = {float(value)!r}", file=out)
    if args.oracle:
        if args.group != "orthogonal":
            raise ConfigError("--oracle applies to the orthogonal group only")
        o = moments.orthogonal_moment_oracle(args.partition, args.d)
        print(f"oracle {o.numerator}/{o.denominator} = {float(o)!r} match={o == value}", file=out)
    return 0


def cmd_bounds(args, out) -> int:
    g = bounds.guarantee(args.theorem, args.k, args.n, args.log_base)
    print(f"theorem={g.theorem} k={g.k} n={g.n}", file=out)
    print(f"formula={bounds.FORMULAS[g.theorem]}", file=out)
    print(f"bound={g.raw!r}", file=out)
    print(f"vacuous={'true' if g.vacuous else 'false'}", file=out)
    print(f"log_base={g.log_base}", file=out)
    return 0


def cmd_depth(args, out) -> int:
    if args.ensemble == "4design":
        depth = required_depth_4design(args.n, args.epsilon)
        print("formula=16*(4n + log2(1/eps))", file=out)
    elif args.ensemble == "tdesign":
        depth = required_depth_tdesign(args.n, args.t, args.epsilon, args.constant)
        print(f"formula={args.constant!r}*log2(t)^7*(2nt + log2(1/eps))", file=out)
        print("warning=illustrative constant; the true constant is unknown", file=out)
    else:
        depth = required_depth_coarse(args.n, args.t, args.epsilon, args.constant)
        print(f"formula={args.constant!r}*log2(t)^7*t*log2(nt/eps)", file=out)
        print("warning=illustrative constant; the true constant is unknown", file=out)
    print(f"depth={depth}", file=out)
    return 0


def cmd_sample(args, out) -> int:
    if args.n % 2:
        raise ConfigError(f"brickwork circuits need even n, got {args.n}")
    plan = SeedPlan(args.seed, 0)
    circuit = build_brickwork(EnsembleSpec(kind=args.ensemble, n=args.n, depth=args.depth), plan)
    dist = full_distribution(run_circuit(circuit))
    samples = sample_outcomes(dist, args.k, philox_stream(plan.trial_seed, SAMPLING_COUNTER))
    res = lxeb_test(dist, samples, args.b)
    for x in samples:
        print(bitstring(x, args.n), file=out)
    print(f"lxeb_stat={res.statistic!r}", file=out)
    print(f"threshold={res.threshold!r}", file=out)
    print(f"pass={'true' if res.passed else 'false'}", file=out)
    return 0


COMMANDS = {"run": cmd_run, "moments": cmd_moments, "bounds": cmd_bounds, "depth": cmd_depth, "sample": cmd_sample}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
