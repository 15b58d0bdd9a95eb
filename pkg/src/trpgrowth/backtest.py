"""Wealth accounting for threshold and constant rebalanced portfolios on a path."""

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ._validation import check_price_relatives
from .estimation import EstimatorConfig, estimate_market
from .exceptions import NoFeasiblePoint, PathTooShort
from .optimizer import GridSpec, optimize

COST_MODELS = ("paper-approximate", "exact-self-financing")


def rebalance_factor(drifted, target, cost, cost_model="paper-approximate"):
    """Fraction of wealth left after moving the asset-1 weight from ``drifted`` to ``target``.

    ``paper-approximate`` charges ``cost * |drifted - target|``. The exact
    model charges ``cost`` per dollar of asset 1 traded, with the fee coming
    out of the post-trade wealth: ``S' = S - cost * |S drifted - S' target|``.
    """
    if cost_model == "paper-approximate":
        return 1.0 - cost * abs(drifted - target)
    if cost_model == "exact-self-financing":
        if drifted >= target:
            return (1.0 - cost * drifted) / (1.0 - cost * target)
        return (1.0 + cost * drifted) / (1.0 + cost * target)
    raise ValueError(f"unknown cost model {cost_model!r}")


@dataclass
class BacktestResult:
    """Per-period record; index 0 is the starting point with ``S(0) = 1``."""

    wealth: np.ndarray
    portfolio: np.ndarray
    rebalanced: np.ndarray
    cost_paid: np.ndarray
    blocks: list = field(default_factory=list)

    @property
    def terminal_wealth(self):
        return float(self.wealth[-1])

    @property
    def rebalance_count(self):
        return int(self.rebalanced.sum())

    @property
    def total_cost(self):
        return float(self.cost_paid.sum())

    def to_frame(self):
        return pd.DataFrame({
            "period": np.arange(self.wealth.size),
            "wealth": self.wealth,
            "portfolio": self.portfolio,
            "rebalanced": self.rebalanced.astype(int),
            "cost_paid": self.cost_paid,
        })

    def summary(self):
        return {
            "terminal_wealth": self.terminal_wealth,
            "rebalance_count": self.rebalance_count,
            "total_cost": self.total_cost,
            "blocks": [{"start": s, "b": b, "eps": e} for s, b, e in self.blocks],
        }


class _Account:
    def __init__(self, n, b0):
        self.wealth = np.empty(n + 1)
        self.portfolio = np.empty(n + 1)
        self.rebalanced = np.zeros(n + 1, dtype=bool)
        self.cost_paid = np.zeros(n + 1)
        self.wealth[0] = 1.0
        self.portfolio[0] = b0

    def result(self, blocks=()):
        return BacktestResult(self.wealth, self.portfolio, self.rebalanced, self.cost_paid,
                              list(blocks))


def _run(account, path, start, b_now, rule, cost, cost_model):
    """Advance ``account`` over ``path`` from row ``start`` of the record.

    ``rule(drifted)`` returns the target to rebalance to, or None to hold.
    """
    S = account.wealth[start]
    for n, (x1, x2) in enumerate(path, start=start + 1):
        growth = b_now * x1 + (1 - b_now) * x2
        S *= growth
        drifted = b_now * x1 / growth
        target = rule(drifted)
        if target is None:
            b_now = drifted
        else:
            if drifted != target:
                after = S * rebalance_factor(drifted, target, cost, cost_model)
                account.cost_paid[n] = S - after
                S = after
            account.rebalanced[n] = True
            b_now = target
        account.wealth[n] = S
        account.portfolio[n] = b_now
    return b_now


def simulate_trp(path, b, epsilon, cost, cost_model="paper-approximate", rebalance=True):
    """Run TRP(b, epsilon) on a two-asset path starting from allocation ``b``.

    With ``rebalance=False`` the portfolio is bought and held.
    """
    path = check_price_relatives(path, n_assets=2)
    acct = _Account(len(path), b)
    lo, hi = b - epsilon, b + epsilon

    def rule(drifted):
        return None if (not rebalance or lo < drifted < hi) else b

    _run(acct, path, 0, b, rule, cost, cost_model)
    return acct.result([(0, b, epsilon)])


def run_crp(path, b, cost, cost_model="paper-approximate"):
    """Constant rebalanced portfolio: back to ``b`` after every period."""
    path = check_price_relatives(path, n_assets=2)
    acct = _Account(len(path), b)
    _run(acct, path, 0, b, lambda drifted: b, cost, cost_model)
    return acct.result([(0, b, 0.0)])


@dataclass
class BacktestConfig:
    """Windowed re-estimation protocol.

    The first ``initial_window`` periods are only observed. Then, every
    ``block`` periods, the market is re-estimated from the history seen so
    far (or the last ``estimator.window`` points), (b, eps) re-optimised and
    the TRP run on the next block.
    """

    cost: float = 0.01
    block: int = 1000
    initial_window: int = 1000
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    grid: GridSpec = None
    cost_model: str = "paper-approximate"
    default_params: tuple = (0.5, 0.1)

    def __post_init__(self):
        if self.block < 1 or self.initial_window < 1:
            raise ValueError("block and initial_window must be >= 1")
        if self.cost_model not in COST_MODELS:
            raise ValueError(f"unknown cost model {self.cost_model!r}")
        if self.grid is None:
            self.grid = GridSpec(np.round(np.arange(0.1, 0.91, 0.1), 10),
                                 np.round(np.arange(0.02, 0.41, 0.02), 10),
                                 fallback_horizon=50, prune_to=128)


def run_trp(path, config=None):
    """Backtest the estimated-and-optimised TRP with periodic re-estimation.

    The wealth record covers only the invested periods (after the initial
    window). When no grid cell is feasible the previous block's pair, or
    ``config.default_params`` for the first block, is kept.
    """
    config = BacktestConfig() if config is None else config
    path = check_price_relatives(path, n_assets=2)
    n = len(path)
    if n <= config.initial_window:
        raise PathTooShort(
            f"path has {n} periods, need more than initial_window={config.initial_window}"
        )
    invest = n - config.initial_window
    b, eps = config.default_params
    acct = None
    blocks = []
    b_now = None
    for t0 in range(config.initial_window, n, config.block):
        market = estimate_market(path[:t0], config.estimator)
        try:
            res = optimize(market, config.cost, config.grid)
            b, eps = res.b, res.epsilon
        except NoFeasiblePoint:
            pass
        if acct is None:
            acct = _Account(invest, b)
            b_now = b
        blocks.append((t0 - config.initial_window, b, eps))
        lo, hi, tgt = b - eps, b + eps, b

        def rule(drifted, lo=lo, hi=hi, tgt=tgt):
            return None if lo < drifted < hi else tgt

        seg = path[t0:t0 + config.block]
        b_now = _run(acct, seg, t0 - config.initial_window, b_now, rule, config.cost,
                     config.cost_model)
    return acct.result(blocks)


def run_crp_baseline(path, config, b=0.5):
    """CRP over the same invested periods as :func:`run_trp`."""
    path = check_price_relatives(path, n_assets=2)
    if len(path) <= config.initial_window:
        raise PathTooShort(
            f"path has {len(path)} periods, need more than initial_window={config.initial_window}"
        )
    return run_crp(path[config.initial_window:], b, config.cost, config.cost_model)
