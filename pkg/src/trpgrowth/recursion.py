"""Exact period-by-period evaluation of E[S(n)] for threshold rebalanced portfolios.

The carrier is ``e_l(n) = Pr(b(n) = b_l) * E[S(n) | b(n) = b_l]`` over the
portfolios achievable at period ``n``; ``E[S(n)]`` is its sum. States are
keyed by their log offsets (rounded to ``OFFSET_ATOL``) rather than by the
floating-point portfolio value.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import StateExplosion
from .statespace import OFFSET_ATOL, portfolio_at

DEFAULT_MAX_STATES = 200_000


@dataclass(frozen=True, eq=False)
class WealthState:
    period: int
    offsets: np.ndarray
    portfolios: np.ndarray
    probs: np.ndarray
    weighted_wealth: np.ndarray

    @property
    def n_states(self):
        return self.offsets.shape[0]

    @property
    def expected_wealth(self):
        return float(self.weighted_wealth.sum())

    def to_rows(self):
        """Rows ``(period, state, prob, weighted_wealth)`` for CSV dumps."""
        return [
            (self.period, i, float(p), float(e))
            for i, (p, e) in enumerate(zip(self.probs, self.weighted_wealth))
        ]


def initial_state(params):
    """All wealth (one unit) sits at the target portfolio at period 0."""
    return WealthState(0, np.zeros(1), np.array([params.b]), np.ones(1), np.ones(1))


def _pair_moves(market):
    """Support pairs ``(w1, w2)`` with their joint probability and log-ratio."""
    x1, p1 = market.support(0)
    x2, p2 = market.support(1)
    w1 = np.repeat(x1, x2.size)
    w2 = np.tile(x2, x1.size)
    p = np.repeat(p1, x2.size) * np.tile(p2, x1.size)
    return w1, w2, p, np.log(w2 / w1)


def step(state, market, params, moves=None):
    """Advance the weighted-wealth vector by one period.

    Outcomes that keep the allocation inside the no-trade interval move the
    state by ``z`` with growth ``b_k w1 + (1 - b_k) w2``; outcomes that leave
    it land on the target and additionally pay ``1 - c |b' - b|``.
    """
    w1, w2, p, z = moves if moves is not None else _pair_moves(market)
    bk = state.portfolios[:, None]
    growth = bk * w1 + (1.0 - bk) * w2
    drifted = bk * w1 / growth
    stay = params.inside(drifted)
    factor = np.where(stay, growth, growth * (1.0 - params.cost * np.abs(drifted - params.b)))
    new_offsets = np.where(stay, state.offsets[:, None] + z, 0.0)
    mass = state.probs[:, None] * p
    wealth = state.weighted_wealth[:, None] * factor * p
    return _aggregate(state.period + 1, new_offsets.ravel(), mass.ravel(), wealth.ravel(),
                      params.b)


def _aggregate(period, offsets, mass, wealth, b):
    keep = mass > 0
    offsets, mass, wealth = offsets[keep], mass[keep], wealth[keep]
    keys = np.round(offsets / OFFSET_ATOL).astype(np.int64)
    uniq, inverse = np.unique(keys, return_inverse=True)
    probs = np.bincount(inverse, weights=mass, minlength=uniq.size)
    ww = np.bincount(inverse, weights=wealth, minlength=uniq.size)
    offs = uniq * OFFSET_ATOL
    return WealthState(period, offs, portfolio_at(b, offs), probs, ww)


def prune(state, prune_to, b):
    """Keep the ``prune_to`` most probable states; fold the rest into the
    nearest survivor by log offset, conserving probability and wealth."""
    if prune_to is None or state.n_states <= prune_to:
        return state
    order = np.lexsort((state.offsets, -state.probs))
    kept = np.sort(order[:prune_to])
    dropped = order[prune_to:]
    kept_offsets = state.offsets[kept]
    pos = np.searchsorted(kept_offsets, state.offsets[dropped])
    left = np.clip(pos - 1, 0, kept.size - 1)
    right = np.clip(pos, 0, kept.size - 1)
    d_left = np.abs(state.offsets[dropped] - kept_offsets[left])
    d_right = np.abs(kept_offsets[right] - state.offsets[dropped])
    target = np.where(d_right < d_left, right, left)
    probs = state.probs[kept].copy()
    ww = state.weighted_wealth[kept].copy()
    np.add.at(probs, target, state.probs[dropped])
    np.add.at(ww, target, state.weighted_wealth[dropped])
    return WealthState(state.period, kept_offsets, portfolio_at(b, kept_offsets), probs, ww)


def iterate_states(market, params, n_periods, prune_to=None, max_states=DEFAULT_MAX_STATES):
    """Yield the WealthState of every period ``1..n_periods``."""
    moves = _pair_moves(market)
    state = initial_state(params)
    for _ in range(int(n_periods)):
        state = step(state, market, params, moves)
        if state.n_states > max_states:
            raise StateExplosion(
                f"{state.n_states} states at period {state.period} exceed max_states={max_states}"
            )
        state = prune(state, prune_to, params.b)
        yield state


def expected_wealth(market, params, n_periods, prune_to=None, max_states=DEFAULT_MAX_STATES):
    """E[S(n)] for ``n = 1..n_periods`` as an array (``S(0) = 1``)."""
    if int(n_periods) < 1:
        raise ValueError("n_periods must be at least 1")
    return np.array([s.expected_wealth
                     for s in iterate_states(market, params, n_periods, prune_to, max_states)])


# m-asset generalisation -------------------------------------------------------

def _joint_moves(market):
    supports = [market.support(i) for i in range(market.n_assets)]
    grids = np.meshgrid(*[x for x, _ in supports], indexing="ij")
    pgrids = np.meshgrid(*[p for _, p in supports], indexing="ij")
    X = np.column_stack([g.ravel() for g in grids])
    p = np.prod(np.column_stack([g.ravel() for g in pgrids]), axis=1)
    return X, p


def _weights_from_offsets(targets, offsets):
    logw = np.log(targets) + np.concatenate([np.zeros((offsets.shape[0], 1)), offsets], axis=1)
    logw -= logw.max(axis=1, keepdims=True)
    w = np.exp(logw)
    return w / w.sum(axis=1, keepdims=True)


def expected_wealth_m_asset(market, targets, thresholds, cost, n_periods, prune_to=None,
                            max_states=DEFAULT_MAX_STATES):
    """E[S(n)] for an m-asset TRP with box no-trade zone.

    The allocation drifts as ``b o x / x^T b``; once any coordinate leaves
    ``(b_i - eps_i, b_i + eps_i)`` it is reset to ``targets`` and wealth is
    multiplied by ``1 - cost * sum_i |b'_i - b_i| / 2``. States are keyed by
    the log offsets of assets ``2..m`` relative to asset 1.
    """
    targets = np.asarray(targets, dtype=float)
    thresholds = np.broadcast_to(np.asarray(thresholds, dtype=float), targets.shape)
    m = targets.size
    if m < 2 or market.n_assets != m:
        raise ValueError(f"need m >= 2 targets matching the market's {market.n_assets} assets")
    if np.any(targets <= 0) or abs(targets.sum() - 1) > 1e-12:
        raise ValueError("targets must lie in the open simplex")
    if np.any(thresholds <= 0) or np.any(targets - thresholds <= 0) or np.any(targets + thresholds >= 1):
        raise ValueError("every box side must lie inside (0, 1)")
    if int(n_periods) < 1:
        raise ValueError("n_periods must be at least 1")

    X, p = _joint_moves(market)
    logrel = np.log(X[:, 1:]) - np.log(X[:, :1])
    offsets = np.zeros((1, m - 1))
    probs = np.ones(1)
    ww = np.ones(1)
    out = []
    for _ in range(int(n_periods)):
        w = _weights_from_offsets(targets, offsets)
        growth = w @ X.T
        drifted = w[:, None, :] * X[None, :, :] / growth[:, :, None]
        stay = np.all(np.abs(drifted - targets) < thresholds, axis=2)
        turnover = 0.5 * np.abs(drifted - targets).sum(axis=2)
        factor = np.where(stay, growth, growth * (1.0 - cost * turnover))
        new_off = np.where(stay[:, :, None], offsets[:, None, :] + logrel[None, :, :], 0.0)
        mass = (probs[:, None] * p).ravel()
        wealth = (ww[:, None] * factor * p).ravel()
        new_off = new_off.reshape(-1, m - 1)
        keep = mass > 0
        keys = np.round(new_off[keep] / OFFSET_ATOL).astype(np.int64)
        uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
        inverse = inverse.ravel()
        probs = np.bincount(inverse, weights=mass[keep], minlength=uniq.shape[0])
        ww = np.bincount(inverse, weights=wealth[keep], minlength=uniq.shape[0])
        offsets = uniq * OFFSET_ATOL
        if offsets.shape[0] > max_states:
            raise StateExplosion(f"{offsets.shape[0]} states exceed max_states={max_states}")
        if prune_to is not None and offsets.shape[0] > prune_to:
            offsets, probs, ww = _prune_vectors(offsets, probs, ww, prune_to)
        out.append(ww.sum())
    return np.array(out)


def _prune_vectors(offsets, probs, ww, prune_to):
    order = np.lexsort(tuple(offsets.T[::-1]) + (-probs,))
    kept = np.sort(order[:prune_to])
    dropped = order[prune_to:]
    d = np.linalg.norm(offsets[dropped][:, None, :] - offsets[kept][None, :, :], axis=2)
    target = np.argmin(d, axis=1)
    p = probs[kept].copy()
    e = ww[kept].copy()
    np.add.at(p, target, probs[dropped])
    np.add.at(e, target, ww[dropped])
    return offsets[kept], p, e
