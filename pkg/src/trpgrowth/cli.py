"""Command-line front end: ``trpgrowth {optimize,evaluate,backtest,estimate,simulate}``."""

import argparse
import json
import sys

import numpy as np

from .backtest import COST_MODELS, BacktestConfig, run_crp_baseline, run_trp
from .estimation import EstimatorConfig, estimate_market
from .exceptions import TrpError
from .io import ensure_dir, read_market, read_path, write_frame, write_market, write_path, write_table
from .market import TrpParams, sample_path
from .optimizer import GridSpec, optimize
from .recursion import expected_wealth


def _range(text):
    """Parse ``lo:hi:steps`` into a tuple ``(lo, hi, steps)``."""
    try:
        lo, hi, steps = text.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:steps, got {text!r}") from None
    if steps < 1:
        raise argparse.ArgumentTypeError("steps must be >= 1")
    return lo, hi, steps


def _grid(args, **kw):
    (b_lo, b_hi, b_n), (e_lo, e_hi, e_n) = args.grid_b, args.grid_eps
    return GridSpec.linspace((b_lo, b_hi), (e_lo, e_hi), b_n, e_n, objective=args.objective,
                             horizon=args.horizon, prune_to=args.prune, n_jobs=args.jobs, **kw)


def _estimator(args):
    return EstimatorConfig(window=args.window, bins=args.bins)


def _load_path(args):
    if args.path:
        return read_path(args.path)
    if args.market:
        return sample_path(read_market(args.market), args.periods, args.seed)
    raise ValueError("need --path, or --market with --periods")


def cmd_optimize(args):
    market = read_market(args.market)
    res = optimize(market, args.cost, _grid(args))
    out = ensure_dir(args.out)
    write_frame(res.table, out / "grid.csv")
    print(f"b*={res.b:.12g} eps*={res.epsilon:.12g} g={res.report.growth:.12g}")


def cmd_evaluate(args):
    market = read_market(args.market)
    params = TrpParams(args.b, args.eps, args.cost)
    ew = expected_wealth(market, params, args.periods, prune_to=args.prune)
    out = ensure_dir(args.out)
    n = np.arange(1, ew.size + 1)
    write_table(out / "expected_wealth.csv", ["period", "expected_wealth", "log_growth"],
                zip(n, ew, np.log(ew) / n))
    if ew.size:
        print(f"E[S({ew.size})]={ew[-1]:.12g} g={np.log(ew[-1]) / ew.size:.12g}")


def cmd_backtest(args):
    path = _load_path(args)
    config = BacktestConfig(cost=args.cost, block=args.block, initial_window=args.initial_window,
                            estimator=_estimator(args), cost_model=args.cost_model,
                            grid=_grid(args, fallback_horizon=args.fallback_horizon))
    trp = run_trp(path, config)
    crp = run_crp_baseline(path, config, b=args.crp_b)
    out = ensure_dir(args.out)
    write_frame(trp.to_frame(), out / "wealth_trp.csv")
    write_frame(crp.to_frame(), out / "wealth_crp.csv")
    summary = {"cost": args.cost, "cost_model": args.cost_model, "trp": trp.summary(),
               "crp": {"b": args.crp_b, **crp.summary()}}
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print(f"trp={trp.terminal_wealth:.12g} crp={crp.terminal_wealth:.12g}")


def cmd_estimate(args):
    market = estimate_market(read_path(args.path), _estimator(args))
    out = ensure_dir(args.out)
    write_market(market, out / "market.json")
    print(f"K={market.K}")


def cmd_simulate(args):
    market = read_market(args.market)
    X = sample_path(market, args.periods, args.seed)
    out = ensure_dir(args.out)
    write_path(X.reshape(-1, market.n_assets), out / "path.csv")


COMMANDS = {
    "optimize": cmd_optimize,
    "evaluate": cmd_evaluate,
    "backtest": cmd_backtest,
    "estimate": cmd_estimate,
    "simulate": cmd_simulate,
}


def build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--market", help="market JSON file")
    shared.add_argument("--path", help="price-relative CSV (period,x1,x2)")
    shared.add_argument("--cost", type=float, default=0.01)
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--out", default=".")
    shared.add_argument("--grid-b", type=_range, default=(0.05, 0.95, 19))
    shared.add_argument("--grid-eps", type=_range, default=(0.01, 0.49, 49))
    shared.add_argument("--objective", choices=["eigenvalue", "finite-horizon"],
                        default="eigenvalue")
    shared.add_argument("--horizon", type=int, default=200)
    shared.add_argument("--fallback-horizon", type=int, default=50)
    shared.add_argument("--prune", type=int, default=256)
    shared.add_argument("--jobs", type=int, default=1)
    shared.add_argument("--window", type=int, default=None)
    shared.add_argument("--bins", type=int, default=10)
    shared.add_argument("--block", type=int, default=1000)
    shared.add_argument("--initial-window", type=int, default=1000)
    shared.add_argument("--cost-model", choices=COST_MODELS, default="paper-approximate")
    shared.add_argument("--crp-b", type=float, default=0.5)
    shared.add_argument("--periods", "-n", type=int, default=1000)
    shared.add_argument("--b", type=float, default=0.5)
    shared.add_argument("--eps", type=float, default=0.1)

    parser = argparse.ArgumentParser(prog="trpgrowth",
                                     description="Threshold rebalanced portfolio toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[shared], help=fn.__doc__)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (TrpError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
