"""Maximum-likelihood pmf estimates, with quantisation for continuous data."""

from dataclasses import dataclass

import numpy as np

from ._validation import check_price_relatives
from .exceptions import EmptyObservations
from .market import DiscreteMarket, validate_market


@dataclass(frozen=True)
class EstimatorConfig:
    """``window=None`` uses all history; otherwise only the last ``window`` points."""

    window: int = None
    bins: int = 10

    def __post_init__(self):
        if self.bins < 1:
            raise ValueError("bins must be >= 1")
        if self.window is not None and self.window < 1:
            raise ValueError("window must be >= 1")


def category_counts(observations, atoms, rtol=1e-12):
    """Occurrences ``N_j`` of each atom; every observation must be a known atom."""
    obs = np.asarray(observations, dtype=float).ravel()
    if obs.size == 0:
        raise EmptyObservations("no observations to estimate from")
    atoms = np.asarray(atoms, dtype=float)
    order = np.argsort(atoms)
    sorted_atoms = atoms[order]
    pos = np.clip(np.searchsorted(sorted_atoms, obs), 0, atoms.size - 1)
    left = np.clip(pos - 1, 0, atoms.size - 1)
    pick = np.where(np.abs(sorted_atoms[left] - obs) < np.abs(sorted_atoms[pos] - obs), left, pos)
    if not np.allclose(sorted_atoms[pick], obs, rtol=rtol, atol=0):
        raise ValueError("observation outside the sample space")
    return np.bincount(order[pick], minlength=atoms.size)


def mle_pmf(observations, atoms):
    """Empirical frequencies ``N_j / N``, the maximiser of the likelihood."""
    counts = category_counts(observations, atoms)
    return counts / counts.sum()


def quantize_and_estimate(raw, config=None):
    """Quantise observations into equal-frequency bins and estimate a pmf.

    Bin edges are empirical quantiles of the (windowed) data; each atom is
    the mean of its bin's members and empty bins are dropped. Returns
    ``(atoms, pmf)`` with atoms ascending.
    """
    config = EstimatorConfig() if config is None else config
    raw = np.asarray(raw, dtype=float).ravel()
    if config.window is not None:
        raw = raw[-config.window:]
    if raw.size == 0:
        raise EmptyObservations("no observations to estimate from")
    edges = np.quantile(raw, np.linspace(0.0, 1.0, config.bins + 1))
    which = np.searchsorted(edges[1:-1], raw, side="right")
    counts = np.bincount(which, minlength=config.bins)
    atoms = []
    for j in np.flatnonzero(counts):
        members = raw[which == j]
        lo, hi = members.min(), members.max()
        atoms.append(lo if lo == hi else members.mean())
    atoms = np.array(atoms)
    pmf = counts[counts > 0] / raw.size
    return atoms, pmf


def estimate_market(path, config=None):
    """Fit a DiscreteMarket to a price-relative path, one asset at a time.

    The per-asset atom sets are pooled into one shared sample space; an
    asset puts zero mass on atoms it did not produce.
    """
    config = EstimatorConfig() if config is None else config
    path = check_price_relatives(path, min_periods=1)
    if config.window is not None:
        path = path[-config.window:]
    per_asset = [quantize_and_estimate(path[:, i], EstimatorConfig(None, config.bins))
                 for i in range(path.shape[1])]
    samples = np.concatenate([a for a, _ in per_asset])
    pmfs = []
    offset = 0
    for atoms, pmf in per_asset:
        p = np.zeros(samples.size)
        p[offset:offset + atoms.size] = pmf
        pmfs.append(p)
        offset += atoms.size
    return validate_market(DiscreteMarket(samples, tuple(pmfs)))


def log_likelihood_rate(counts, theta):
    """``sum_j (N_j / N) ln theta_j`` (``0 * ln 0`` taken as 0)."""
    counts = np.asarray(counts, dtype=float)
    h = counts / counts.sum()
    theta = np.asarray(theta, dtype=float)
    mask = h > 0
    with np.errstate(divide="ignore"):
        return float(np.sum(h[mask] * np.log(theta[mask])))
