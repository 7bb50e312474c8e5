"""Command line entry point: ``fsieve {simulate,select,bootstrap,test,experiment}``."""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

import numpy as np

from fsieve.blockboot import BlockConfig, block_replicates
from fsieve.fcurve import FunctionalSeries, read_csv, write_csv
from fsieve.fpca import fpca, scores
from fsieve.harness import FULL_SCALE, ExperimentConfig, run_experiment, write_fpca_csv
from fsieve.select import DEFAULT_Q, aicc_select, dvr_values, gvr_select, m_hat, vr_select
from fsieve.sieve import fit, replicate_many
from fsieve.simgen import OPERATORS, Fma1FourierSpec, Fma1KernelSpec, fma1_fourier, fma1_kernel
from fsieve.stats import mean_sd_bootstrap, two_sample_test

log = logging.getLogger("fsieve")


def _auto_int(text: str) -> int | str:
    return "auto" if text.lower() == "auto" else int(text)


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _rng(args) -> np.random.Generator:
    return np.random.default_rng(args.seed)


def _print_table(header: list[str], rows: list[list], out: Path | None = None) -> None:
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    print("  ".join(str(h).rjust(w) for h, w in zip(header, widths)))
    for r in rows:
        print("  ".join(str(v).rjust(w) for v, w in zip(r, widths)))
    if out is not None:
        with open(out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)


# -- subcommands -------------------------------------------------------------


def cmd_simulate(args) -> int:
    rng = _rng(args)
    if args.model == "fma1-fourier":
        spec = Fma1FourierSpec(grid_size=args.grid_size, operator=args.operator)
        series = fma1_fourier(spec, args.n, rng)
    else:
        series = fma1_kernel(Fma1KernelSpec(args.grid_size), args.n, args.gamma, args.which, rng)
    write_csv(series, args.out)
    print(f"wrote {series.n} curves on {series.grid.size} points to {args.out}")
    return 0


def cmd_select(args) -> int:
    series = read_csv(args.input)
    _, eig = fpca(series)
    if args.dump_fpca:
        write_fpca_csv(series, args.dump_fpca)
    crit = args.criterion
    if crit == "vr":
        rep = vr_select(eig.eigenvalues, args.q)
    elif crit == "gvr":
        rep = gvr_select(series, eig, args.q)
    elif crit == "dvr":
        vals = dvr_values(series, eig)
        rows = [[m, f"{v:.6f}", ""] for m, v in enumerate(vals)]
        _print_table(["m", "DVR", "chosen"], rows, args.out)
        return 0
    elif crit == "m_hat":
        rep = m_hat(series, eig, args.q, args.base, log_base=args.log_base)
        print(f"m_Q = {rep.details['m_Q']}  m_E = {rep.details['m_E']}  m_hat = {rep.chosen}")
        rep = rep.details["sub"]
    else:
        m = args.m if args.m is not None else m_hat(series, eig, args.q, log_base=args.log_base).chosen
        if m == 0:
            raise ValueError("m = 0 (white noise): there is no VAR order to select")
        rep = aicc_select(scores(series, eig, m), args.p_max)
        print(f"AICC over VAR orders for m = {m}")
    rows = [[c, f"{v:.6f}", "*" if chosen else ""] for c, v, chosen in rep.rows()]
    _print_table(["candidate", rep.criterion, "chosen"], rows, args.out)
    return 0


def cmd_bootstrap(args) -> int:
    series = read_csv(args.input)
    rng = _rng(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.method == "sieve":
        source = fit(series, args.m, args.p, args.q)
        print(f"sieve fit: m = {source.m}, p = {source.p}, burn-in = {source.burn_in}")
    else:
        if args.b is None:
            raise ValueError(f"--b is required for --method {args.method}")
        source = BlockConfig(args.method, args.b, args.c)
    if args.emit == "mean-sd":
        sd = mean_sd_bootstrap(series, source, args.replicates, rng)
        path = out / "mean_sd.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["tau", "sd"])
            writer.writerows([[f"{t:.17g}", f"{v:.17g}"] for t, v in zip(series.grid.points, sd)])
        print(f"wrote per-tau bootstrap sd to {path}")
        return 0
    width = len(str(args.replicates))
    for b in range(args.replicates):
        if args.method == "sieve":
            values = replicate_many(source, 1, rng, recentre=not args.no_recentre)[0]
        else:
            values = block_replicates(series.values, source, 1, rng)[0]
        write_csv(FunctionalSeries(series.grid, values), out / f"replicate_{b + 1:0{width}d}.csv")
    print(f"wrote {args.replicates} replicate series to {out}")
    return 0


def cmd_test(args) -> int:
    x, y = read_csv(args.x), read_csv(args.y)
    res = two_sample_test(x, y, args.m_x, args.p_x, args.m_y, args.p_y, args.B, _rng(args), Q=args.q)
    print(f"U = {res.statistic:.6g}")
    print(f"p-value = {res.p_value:.6g}")
    print(f"selected (m, p): x = {res.selections['x']}, y = {res.selections['y']}")
    for alpha in args.alpha:
        print(f"alpha = {alpha:g}: {'reject' if res.reject(alpha) else 'do not reject'}")
    if args.draws:
        with open(args.draws, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["U_star"])
            writer.writerows([[f"{u:.17g}"] for u in res.draws])
    return 0


def cmd_experiment(args) -> int:
    overrides = {"seed": args.seed, "threads": args.threads, "output": args.out}
    if args.full_scale:
        overrides.update(R=FULL_SCALE["replications"], B=FULL_SCALE["bootstrap"],
                         R_exact=FULL_SCALE["exact_replications"])
    overrides.update({k: v for k, v in (("R", args.replications), ("B", args.bootstrap)) if v is not None})
    config = ExperimentConfig.from_ini(args.config, **overrides)
    result = run_experiment(config)
    if result.skipped:
        print(f"{result.output}: already complete (manifest {result.digest})")
    else:
        print(f"{result.output}: wrote {', '.join(result.files)} (manifest {result.digest}, "
              f"{result.failures} failed replicates)")
    return 0


# -- parser ------------------------------------------------------------------


def _common_options(default) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=default, help="master seed")
    common.add_argument("--threads", type=int, default=default, help="worker processes for experiments")
    common.add_argument("-v", "--verbose", action="store_true", default=False if default is None else default)
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fsieve", description=__doc__, parents=[_common_options(None)])
    # options repeated after the subcommand must not reset values given before it
    common = _common_options(argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="generate a functional time series")
    p.add_argument("--model", choices=["fma1-fourier", "fma1-kernel"], default="fma1-fourier")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid-size", type=int, default=21)
    p.add_argument("--operator", choices=OPERATORS, default="random")
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--which", choices=["first", "second"], default="first")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("select", parents=[common], help="choose m or p and print the criterion table")
    p.add_argument("--input", required=True)
    p.add_argument("--criterion", choices=["vr", "gvr", "dvr", "m_hat", "aicc"], default="m_hat")
    p.add_argument("--base", choices=["vr", "gvr"], default=None, help="sub-criterion of m_hat")
    p.add_argument("--q", type=float, default=DEFAULT_Q)
    p.add_argument("--log-base", type=float, default=math.e)
    p.add_argument("--m", type=int, default=None, help="dimension for aicc (default: m_hat)")
    p.add_argument("--p-max", type=int, default=None)
    p.add_argument("--out", default=None, help="also write the table as CSV")
    p.add_argument("--dump-fpca", default=None, metavar="DIR", help="write eigenvalues, eigenfunctions and scores")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("bootstrap", parents=[common], help="sieve or block bootstrap replicates")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=["sieve", "mbb", "tbb", "sb"], default="sieve")
    p.add_argument("--m", type=_auto_int, default="auto")
    p.add_argument("--p", type=_auto_int, default="auto")
    p.add_argument("--q", type=float, default=DEFAULT_Q)
    p.add_argument("--b", type=float, default=None, help="block length (mean length for sb)")
    p.add_argument("--c", type=float, default=0.43, help="taper fraction for tbb")
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--emit", choices=["series", "mean-sd"], default="mean-sd")
    p.add_argument("--no-recentre", action="store_true", help="sieve replicates without the sample mean")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("test", parents=[common], help="hypothesis tests")
    tsub = p.add_subparsers(dest="test", required=True)
    t = tsub.add_parser("two-sample", parents=[common], help="equality of two mean functions")
    t.add_argument("--x", required=True)
    t.add_argument("--y", required=True)
    t.add_argument("--B", type=int, default=1000)
    t.add_argument("--q", type=float, default=DEFAULT_Q)
    for name in ("m-x", "p-x", "m-y", "p-y"):
        t.add_argument(f"--{name}", type=_auto_int, default="auto")
    t.add_argument("--alpha", type=_float_list, default=[0.01, 0.05, 0.10])
    t.add_argument("--draws", default=None, help="write the U* draws to this CSV")
    t.set_defaults(func=cmd_test)

    p = sub.add_parser("experiment", parents=[common], help="run a Monte Carlo study from an INI config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--bootstrap", type=int, default=None)
    p.add_argument("--full-scale", action="store_true", help="R = 1000, B = 1000, R_exact = 20000")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
