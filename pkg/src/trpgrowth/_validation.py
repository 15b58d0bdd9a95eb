"""Input validation helpers shared by the functional API and the estimators."""

import numpy as np

from .exceptions import BadPmf, NonPositivePrice

PMF_SUM_TOL = 1e-9


def check_price_relatives(X, n_assets=None, min_periods=0):
    """Return ``X`` as a 2-D float array of positive, finite price relatives.

    A 1-D input is read as a single period.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1) if X.size else X.reshape(0, n_assets or 2)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D array of price relatives, got shape {X.shape}")
    if n_assets is not None and X.shape[1] != n_assets:
        raise ValueError(f"expected {n_assets} assets, got {X.shape[1]}")
    if X.shape[0] < min_periods:
        raise ValueError(f"need at least {min_periods} periods, got {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise ValueError("price relatives must be finite")
    if np.any(X <= 0):
        raise NonPositivePrice("price relatives must be strictly positive")
    return X


def check_pmf(p, size=None, name="pmf"):
    p = np.asarray(p, dtype=float).ravel()
    if size is not None and p.size != size:
        raise BadPmf(f"{name} has {p.size} entries, expected {size}")
    if not np.all(np.isfinite(p)):
        raise BadPmf(f"{name} has non-finite entries")
    if np.any(p < 0):
        raise BadPmf(f"{name} has negative mass")
    total = p.sum()
    if abs(total - 1.0) > PMF_SUM_TOL:
        raise BadPmf(f"{name} sums to {total:.12g}, not 1")
    return p / total


def check_trp(b, epsilon, cost):
    """Validate a (b, epsilon, cost) triple; see ``TrpParams``."""
    b, epsilon, cost = float(b), float(epsilon), float(cost)
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not (b - epsilon > 0 and b + epsilon < 1):
        raise ValueError(
            f"no-trade interval ({b - epsilon:.6g}, {b + epsilon:.6g}) must lie inside (0, 1)"
        )
    if not 0 <= cost < 1:
        raise ValueError(f"cost must be in [0, 1), got {cost}")
    return b, epsilon, cost


def is_feasible(b, epsilon):
    return epsilon > 0 and b - epsilon > 0 and b + epsilon < 1
