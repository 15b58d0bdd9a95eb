"""Growth-optimal threshold rebalanced portfolios under proportional costs."""

from .backtest import (
    BacktestConfig,
    BacktestResult,
    rebalance_factor,
    run_crp,
    run_crp_baseline,
    run_trp,
    simulate_trp,
)
from .brownian import BrownianSpec, brownian_chain, brownian_market, brownian_states, index_range
from .estimation import EstimatorConfig, estimate_market, log_likelihood_rate, mle_pmf
from .estimators import MarketEstimator, ThresholdRebalancer
from .exceptions import (
    BadPmf,
    EmptyObservations,
    NoConvergence,
    NoFeasiblePoint,
    NonPositivePrice,
    PathTooShort,
    StateCapExceeded,
    StateExplosion,
    TechnicalConditionViolated,
    ToleranceTooCoarse,
    TrpError,
)
from .market import DiscreteMarket, TrpParams, make_market, riskless_market, sample_path, validate_market
from .markov import ChainMatrices, GrowthReport, build_matrices, growth_rate, stationary_distribution
from .optimizer import GridSpec, OptimizeResult, optimize
from .recursion import WealthState, expected_wealth, expected_wealth_m_asset, iterate_states
from .statespace import (
    StateSpace,
    constructive_walk,
    enumerate_states,
    interval_bounds,
    lattice_step,
    log_ratio_alphabet,
    technical_condition_holds,
)

__version__ = "0.1.0"
