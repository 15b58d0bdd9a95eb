"""Discrete i.i.d. markets over price relatives, TRP parameters and path sampling."""

from dataclasses import dataclass

import numpy as np

from ._validation import check_pmf, check_price_relatives, check_trp
from .exceptions import BadPmf, NonPositivePrice


@dataclass(frozen=True, eq=False)
class DiscreteMarket:
    """Price relatives drawn i.i.d. from a shared finite sample space.

    ``pmfs[i]`` is the distribution of asset ``i`` over ``samples``; assets
    are independent of each other. Use :func:`make_market` or
    :func:`validate_market` to obtain a canonical (sorted, merged) market.
    """

    samples: np.ndarray
    pmfs: tuple

    @property
    def n_assets(self):
        return len(self.pmfs)

    @property
    def K(self):
        return len(self.samples)

    @property
    def pmf1(self):
        return self.pmfs[0]

    @property
    def pmf2(self):
        return self.pmfs[1]

    def support(self, asset):
        """Atoms of ``asset`` carrying positive mass, with their probabilities."""
        p = self.pmfs[asset]
        mask = p > 0
        return self.samples[mask], p[mask]

    def mean(self, asset):
        return float(self.samples @ self.pmfs[asset])

    def to_dict(self):
        d = {"samples": self.samples.tolist()}
        for i, p in enumerate(self.pmfs, start=1):
            d[f"pmf{i}"] = p.tolist()
        return d

    def __repr__(self):
        return f"DiscreteMarket(K={self.K}, n_assets={self.n_assets})"


def validate_market(market):
    """Return a canonical copy of ``market``.

    The sample space is sorted ascending; duplicate atoms are merged and
    their probability mass summed. Raises NonPositivePrice or BadPmf.
    """
    samples = np.asarray(market.samples, dtype=float).ravel()
    if samples.size == 0:
        raise NonPositivePrice("sample space is empty")
    if not np.all(np.isfinite(samples)) or np.any(samples <= 0):
        raise NonPositivePrice("every atom of the sample space must be a positive real")
    if len(market.pmfs) < 1:
        raise BadPmf("market needs at least one pmf")
    pmfs = [check_pmf(p, samples.size, name=f"pmf{i + 1}") for i, p in enumerate(market.pmfs)]

    atoms, inverse = np.unique(samples, return_inverse=True)
    merged = []
    for p in pmfs:
        q = np.bincount(inverse, weights=p, minlength=atoms.size)
        q[q < 0] = 0.0
        merged.append(q / q.sum())
    for q in merged:
        q.setflags(write=False)
    atoms.setflags(write=False)
    return DiscreteMarket(atoms, tuple(merged))


def make_market(samples, *pmfs):
    """Build and validate a market, e.g. ``make_market([1, .97, 1.03], p1, p2)``."""
    return validate_market(DiscreteMarket(np.asarray(samples, dtype=float), tuple(pmfs)))


def riskless_market(n_assets=2):
    return make_market([1.0], *([[1.0]] * n_assets))


@dataclass(frozen=True)
class TrpParams:
    """Threshold rebalancing policy: target ``b`` for asset 1, half-width
    ``epsilon`` of the no-trade interval and proportional cost ``cost``."""

    b: float
    epsilon: float
    cost: float = 0.0

    def __post_init__(self):
        b, eps, c = check_trp(self.b, self.epsilon, self.cost)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "cost", c)

    @property
    def lower(self):
        return self.b - self.epsilon

    @property
    def upper(self):
        return self.b + self.epsilon

    def inside(self, portfolio):
        """Elementwise test of ``b - eps < portfolio < b + eps``."""
        return (portfolio > self.lower) & (portfolio < self.upper)


def sample_path(market, n_periods, seed=None):
    """Draw ``n_periods`` i.i.d. price-relative vectors.

    Returns an array of shape ``(n_periods, n_assets)``. Each asset uses its
    own child stream of ``seed``, so a path is reproducible for a fixed seed.
    """
    n_periods = int(n_periods)
    if n_periods < 0:
        raise ValueError("n_periods must be non-negative")
    streams = np.random.SeedSequence(seed).spawn(market.n_assets)
    cols = []
    for p, ss in zip(market.pmfs, streams):
        rng = np.random.default_rng(ss)
        idx = rng.choice(market.K, size=n_periods, p=p)
        cols.append(market.samples[idx])
    if not cols:
        return np.empty((n_periods, 0))
    return np.column_stack(cols) if n_periods else np.empty((0, market.n_assets))


def buy_and_hold_wealth(path, weights):
    """Wealth of a never-rebalanced portfolio started at ``weights``."""
    path = check_price_relatives(path)
    weights = np.asarray(weights, dtype=float)
    return float(weights @ np.prod(path, axis=0))
