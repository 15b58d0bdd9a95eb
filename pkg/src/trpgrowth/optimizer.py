"""Brute-force grid search for the growth-optimal (b, epsilon) pair."""

import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from ._validation import is_feasible
from .exceptions import NoFeasiblePoint, StateCapExceeded
from .market import TrpParams
from .markov import GrowthReport, build_matrices, growth_rate
from .recursion import expected_wealth
from .statespace import (
    enumerate_states,
    interval_bounds,
    log_ratio_alphabet,
    technical_condition_holds,
)

TABLE_COLUMNS = ["b", "eps", "feasible", "finite", "states", "growth", "lambda1"]


@dataclass
class GridSpec:
    """Candidate values for ``b`` and ``epsilon`` and how to score them.

    ``objective`` is ``"eigenvalue"`` (log of the Perron root of the wealth
    matrix) or ``"finite-horizon"`` (``ln E[S(horizon)] / horizon`` from the
    recursion). Under the eigenvalue objective, cells whose chain is not
    finite are skipped unless ``fallback_horizon`` is set, in which case they
    are scored by the finite-horizon objective at that horizon.
    """

    b_values: np.ndarray
    eps_values: np.ndarray
    objective: str = "eigenvalue"
    horizon: int = 200
    fallback_horizon: int = None
    prune_to: int = 256
    max_states: int = 5000
    n_jobs: int = 1

    def __post_init__(self):
        self.b_values = np.atleast_1d(np.asarray(self.b_values, dtype=float))
        self.eps_values = np.atleast_1d(np.asarray(self.eps_values, dtype=float))
        if self.b_values.size == 0 or self.eps_values.size == 0:
            raise ValueError("grid ranges must be nonempty")
        if self.objective not in ("eigenvalue", "finite-horizon"):
            raise ValueError(f"unknown objective {self.objective!r}")

    @classmethod
    def linspace(cls, b_range, eps_range, b_steps, eps_steps, **kw):
        # rounding keeps cells such as b == eps from landing a hair inside the feasible set
        return cls(np.round(np.linspace(*b_range, int(b_steps)), 12),
                   np.round(np.linspace(*eps_range, int(eps_steps)), 12), **kw)

    @classmethod
    def default(cls, **kw):
        """b in 0.05..0.95 by 0.025 and epsilon in 0.01..0.49 by 0.01."""
        b = np.round(np.arange(0.05, 0.95 + 1e-9, 0.025), 10)
        eps = np.round(np.arange(0.01, 0.49 + 1e-9, 0.01), 10)
        return cls(b, eps, **kw)

    def cells(self):
        return [(float(b), float(e)) for b in self.b_values for e in self.eps_values]


@dataclass
class OptimizeResult:
    b: float
    epsilon: float
    report: GrowthReport
    table: pd.DataFrame = field(repr=False)


def _row(b, eps, feasible=False, finite=False, states=0, growth=math.nan):
    return {"b": b, "eps": eps, "feasible": feasible, "finite": finite, "states": states,
            "growth": growth, "lambda1": math.exp(growth) if feasible else math.nan}


def _horizon_growth(market, params, horizon, prune_to):
    ew = expected_wealth(market, params, horizon, prune_to=prune_to)
    return math.log(ew[-1]) / horizon


def evaluate_cell(market, alphabet, cost, b, eps, grid):
    """Score one (b, eps) cell; infeasible cells come back with ``feasible=False``."""
    if not is_feasible(b, eps):
        return _row(b, eps)
    params = TrpParams(b, eps, cost)
    if not technical_condition_holds(alphabet, interval_bounds(params)):
        return _row(b, eps)
    if grid.objective == "finite-horizon":
        g = _horizon_growth(market, params, grid.horizon, grid.prune_to)
        return _row(b, eps, True, False, 0, g)
    try:
        space = enumerate_states(params, alphabet, max_states=grid.max_states)
    except StateCapExceeded as exc:
        space = exc.partial
        finite = False
    else:
        finite = space.finite
    if finite:
        report = growth_rate(build_matrices(space, market, params), with_pi=False)
        return _row(b, eps, True, True, space.L, report.growth)
    if grid.fallback_horizon:
        g = _horizon_growth(market, params, grid.fallback_horizon, grid.prune_to)
        return _row(b, eps, True, False, space.L, g)
    return {**_row(b, eps), "states": space.L}


def best_cell(table):
    """Index of the feasible row with maximal growth.

    Ties go to the smaller epsilon, then the smaller b.
    """
    feas = table[table["feasible"]]
    if feas.empty:
        raise NoFeasiblePoint("no grid point is a feasible TRP for this market")
    top = feas["growth"].max()
    best = feas[feas["growth"] == top].sort_values(["eps", "b"], kind="mergesort")
    return best.index[0]


def optimize(market, cost, grid=None):
    """Evaluate every grid cell and return the growth-optimal feasible one."""
    grid = GridSpec.default() if grid is None else grid
    alphabet = log_ratio_alphabet(market)
    cells = grid.cells()
    if grid.n_jobs == 1:
        rows = [evaluate_cell(market, alphabet, cost, b, e, grid) for b, e in cells]
    else:
        rows = Parallel(n_jobs=grid.n_jobs)(
            delayed(evaluate_cell)(market, alphabet, cost, b, e, grid) for b, e in cells
        )
    table = pd.DataFrame(rows, columns=TABLE_COLUMNS)
    i = best_cell(table)
    b, eps = float(table.at[i, "b"]), float(table.at[i, "eps"])
    g = float(table.at[i, "growth"])
    pi = None
    if table.at[i, "finite"]:
        params = TrpParams(b, eps, cost)
        space = enumerate_states(params, alphabet, max_states=grid.max_states)
        pi = growth_rate(build_matrices(space, market, params)).pi
    report = GrowthReport(math.exp(g), g, pi)
    return OptimizeResult(b, eps, report, table)
