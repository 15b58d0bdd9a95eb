"""Closed forms for the sampled two-asset Brownian market.

Asset 1 is riskless (``X1 = 1``) and ``X2 = exp(k Z)`` with ``Z = +-1``
equiprobable. Offsets are integer multiples of ``k`` so the states, the
transition matrix and the wealth matrix can be written down directly.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import TechnicalConditionViolated
from .market import TrpParams, make_market
from .markov import ChainMatrices, is_irreducible
from .statespace import StateSpace, interval_bounds


@dataclass(frozen=True)
class BrownianSpec:
    k: float
    params: TrpParams

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("k must be positive")


def brownian_market(k):
    """The equivalent generic 3-atom market ``{e^-k, 1, e^k}``."""
    atoms = [math.exp(-k), 1.0, math.exp(k)]
    return make_market(atoms, [0.0, 1.0, 0.0], [0.5, 0.0, 0.5])


def index_range(spec):
    """``(i_min, i_max)``: extreme offsets, in units of ``k``, inside the interval."""
    bounds = interval_bounds(spec.params)
    if not spec.k < min(bounds.alpha1, -bounds.alpha2):
        raise TechnicalConditionViolated(
            f"k={spec.k:.6g} is not below min(|alpha1|, |alpha2|)="
            f"{min(bounds.alpha1, -bounds.alpha2):.6g}"
        )
    i_min = math.ceil(bounds.alpha2 / spec.k)
    i_max = math.floor(bounds.alpha1 / spec.k)
    return i_min, i_max


def brownian_states(spec):
    """States ``b_i = b / (b + (1 - b) e^{(i + i_min - 1) k})``, ``i = 1..S``.

    Ordered by increasing offset (decreasing portfolio); the target sits at
    zero-based index ``-i_min``.
    """
    b = spec.params.b
    i_min, i_max = index_range(spec)
    lattice = np.arange(i_min, i_max + 1, dtype=np.int64)
    offsets = lattice * spec.k
    states = b / (b + (1 - b) * np.exp(offsets))
    states[-i_min] = b
    return StateSpace(spec.params, states, offsets, spec.k, True, -i_min,
                      interval_bounds(spec.params), lattice)


def brownian_chain(spec, space=None):
    """``P`` and ``Q`` from the closed forms.

    Interior moves: up one index with ``X2 = e^k``, down one with
    ``X2 = e^-k``, each with probability 1/2. Leaving through either end
    rebalances into the target with the cost factor applied.
    """
    space = brownian_states(spec) if space is None else space
    b, c, k = spec.params.b, spec.params.cost, spec.k
    bs = space.states
    S = bs.size
    t = space.target_index
    P = np.zeros((S, S))
    Q = np.zeros((S, S))
    up = 0.5 * (bs + (1 - bs) * math.exp(k))
    down = 0.5 * (bs + (1 - bs) * math.exp(-k))
    for j in range(S):
        if j + 1 < S:
            P[j + 1, j] += 0.5
            Q[j + 1, j] += up[j]
        if j - 1 >= 0:
            P[j - 1, j] += 0.5
            Q[j - 1, j] += down[j]
    b_low = bs[0] / (bs[0] + (1 - bs[0]) * math.exp(-k))
    b_high = bs[-1] / (bs[-1] + (1 - bs[-1]) * math.exp(k))
    P[t, 0] += 0.5
    Q[t, 0] += down[0] * (1 - c * abs(b_low - b))
    P[t, S - 1] += 0.5
    Q[t, S - 1] += up[-1] * (1 - c * abs(b_high - b))
    return ChainMatrices(P, Q, space, is_irreducible(P))
