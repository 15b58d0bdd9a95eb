"""scikit-learn style front end.

``X`` is always an ``(n_periods, n_assets)`` array of price relatives.
"""

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_price_relatives, check_trp
from .backtest import COST_MODELS, simulate_trp
from .estimation import EstimatorConfig, estimate_market
from .optimizer import GridSpec, optimize


class MarketEstimator(BaseEstimator):
    """Quantise each asset into equal-frequency bins and estimate its pmf.

    Parameters
    ----------
    bins : int
        Bins per asset.
    window : int or None
        Use only the last ``window`` periods; None uses all of them.

    Attributes
    ----------
    market_ : DiscreteMarket
    """

    def __init__(self, bins=10, window=None):
        self.bins = bins
        self.window = window

    def fit(self, X, y=None):
        X = check_price_relatives(X, min_periods=1)
        self.market_ = estimate_market(X, EstimatorConfig(self.window, self.bins))
        self.n_features_in_ = X.shape[1]
        return self

    @property
    def samples_(self):
        check_is_fitted(self, "market_")
        return self.market_.samples

    @property
    def pmfs_(self):
        check_is_fitted(self, "market_")
        return self.market_.pmfs


class ThresholdRebalancer(BaseEstimator):
    """Growth-optimal threshold rebalanced portfolio for two assets.

    ``fit`` estimates the price-relative distribution from ``X`` (or takes
    ``market`` directly) and picks ``(b, epsilon)`` by grid search. If both
    ``b`` and ``epsilon`` are given, the search is skipped.

    Attributes
    ----------
    b_, epsilon_ : float
        Target allocation in asset 1 and no-trade half-width.
    growth_ : float
        Per-period growth of expected wealth at the chosen pair (nan when
        the pair was fixed by the user).
    grid_table_ : pandas.DataFrame or None
    market_ : DiscreteMarket
    """

    def __init__(self, cost=0.01, b=None, epsilon=None, grid=None, bins=10, window=None,
                 cost_model="paper-approximate"):
        self.cost = cost
        self.b = b
        self.epsilon = epsilon
        self.grid = grid
        self.bins = bins
        self.window = window
        self.cost_model = cost_model

    def fit(self, X=None, y=None, market=None):
        if self.cost_model not in COST_MODELS:
            raise ValueError(f"unknown cost model {self.cost_model!r}")
        if market is None:
            X = check_price_relatives(X, n_assets=2, min_periods=1)
            market = estimate_market(X, EstimatorConfig(self.window, self.bins))
        self.market_ = market
        self.n_features_in_ = 2
        if self.b is not None and self.epsilon is not None:
            self.b_, self.epsilon_, _ = check_trp(self.b, self.epsilon, self.cost)
            self.growth_ = math.nan
            self.grid_table_ = None
            return self
        res = optimize(market, self.cost, self.grid if self.grid is not None else GridSpec.default())
        self.b_, self.epsilon_ = res.b, res.epsilon
        self.growth_ = res.report.growth
        self.grid_table_ = res.table
        self.report_ = res.report
        return self

    def simulate(self, X):
        check_is_fitted(self, "b_")
        return simulate_trp(X, self.b_, self.epsilon_, self.cost, self.cost_model)

    def transform(self, X):
        """Allocation ``[b(n), 1 - b(n)]`` held at the start of each period."""
        res = self.simulate(X)
        held = res.portfolio[:-1]
        return np.column_stack([held, 1 - held])

    def predict(self, X):
        """Wealth after each period, starting from one unit."""
        return self.simulate(X).wealth[1:]

    def score(self, X, y=None):
        """Realised log growth per period on ``X``."""
        res = self.simulate(X)
        n = len(res.wealth) - 1
        return math.log(res.terminal_wealth) / n if n else 0.0
