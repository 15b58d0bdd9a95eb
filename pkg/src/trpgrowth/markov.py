"""Finite-state Markov chain of a threshold portfolio and its growth rate.

Orientation: ``P[i, j]`` is the probability of moving from state ``j`` to
state ``i`` (columns sum to one), so ``pi(n + 1) = P @ pi(n)``. ``Q`` has
the same layout and propagates weighted wealth, ``e(n + 1) = Q @ e(n)``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eig
from scipy.sparse.csgraph import connected_components

from .exceptions import NoConvergence
from .recursion import _pair_moves

DEFAULT_MAX_ITER = 1_000_000
DENSE_LIMIT = 2000


@dataclass(frozen=True, eq=False)
class ChainMatrices:
    P: np.ndarray
    Q: np.ndarray
    space: object
    irreducible: bool

    @property
    def L(self):
        return self.P.shape[0]

    def to_rows(self, which="Q"):
        """Nonzero entries as ``(row, col, value)`` for CSV export."""
        M = self.Q if which == "Q" else self.P
        r, c = np.nonzero(M)
        return [(int(i), int(j), float(M[i, j])) for i, j in zip(r, c)]


@dataclass(frozen=True, eq=False)
class GrowthReport:
    lambda1: float
    growth: float
    pi: np.ndarray = None
    iterations: int = 0


def build_matrices(space, market, params):
    """Transition matrix ``P`` and wealth matrix ``Q`` over a finite state space.

    An outcome that keeps the allocation inside the lattice of achievable
    states moves to that state; any other outcome rebalances to the target
    and its ``Q`` entry carries the extra factor ``1 - c |b' - b|``.
    """
    if not space.finite:
        raise ValueError("build_matrices needs a finite state space")
    L = space.L
    w1, w2, p, z = _pair_moves(market)
    P = np.zeros((L, L))
    Q = np.zeros((L, L))
    tgt = space.target_index
    if space.lattice is not None and math.isfinite(space.lattice_step):
        index = {int(j): i for i, j in enumerate(space.lattice)}
        move = np.round(z / space.lattice_step).astype(np.int64)
        dest = lambda k: [index.get(int(space.lattice[k] + m)) for m in move]  # noqa: E731
    else:
        dest = lambda k: [space.index_of_offset(space.offsets[k] + zz) for zz in z]  # noqa: E731
    for k in range(L):
        bk = space.states[k]
        growth = bk * w1 + (1 - bk) * w2
        drifted = bk * w1 / growth
        for d, g, bd, pr in zip(dest(k), growth, drifted, p):
            if d is None:
                P[tgt, k] += pr
                Q[tgt, k] += g * (1 - params.cost * abs(bd - params.b)) * pr
            else:
                P[d, k] += pr
                Q[d, k] += g * pr
    return ChainMatrices(P, Q, space, is_irreducible(P))


def is_irreducible(P):
    n, _ = connected_components(P > 0, directed=True, connection="strong")
    return n == 1


def chain_period(P):
    """Period of an irreducible chain (gcd of cycle lengths through state 0)."""
    A = P > 0
    L = A.shape[0]
    level = {0: 0}
    frontier = [0]
    g = 0
    while frontier:
        nxt = []
        for j in frontier:
            for i in np.flatnonzero(A[:, j]):
                i = int(i)
                if i in level:
                    g = math.gcd(g, level[j] + 1 - level[i])
                else:
                    level[i] = level[j] + 1
                    nxt.append(i)
        frontier = nxt
    return g if L else 0


def stationary_distribution(chain, tol=1e-13, max_iter=DEFAULT_MAX_ITER, method="auto"):
    """Fixed point of ``P``.

    ``"solve"`` solves ``(P - I) pi = 0`` with one equation replaced by
    ``sum(pi) = 1``, which needs an irreducible chain. ``"power"`` iterates the
    lazy chain ``(I + P) / 2``; it has the same stationary vector and no
    periodicity, and stops once ``||P pi - pi||_1 < tol``. ``"auto"`` solves
    when the chain is irreducible and small enough, then polishes with the
    power iteration if the residual is above ``tol``.
    """
    P = chain.P
    L = P.shape[0]
    if method == "auto":
        method = "solve" if chain.irreducible and L <= DENSE_LIMIT else "power"
    if method == "solve":
        A = P - np.eye(L)
        A[-1, :] = 1.0
        rhs = np.zeros(L)
        rhs[-1] = 1.0
        pi = np.clip(np.linalg.solve(A, rhs), 0.0, None)
        pi /= pi.sum()
        if np.abs(P @ pi - pi).sum() < tol:
            return pi
    elif method == "power":
        pi = np.full(L, 1.0 / L)
    else:
        raise ValueError(f"unknown method {method!r}")
    for it in range(1, max_iter + 1):
        nxt = 0.5 * (pi + P @ pi)
        nxt /= nxt.sum()
        pi = nxt
        if np.abs(P @ pi - pi).sum() < tol:
            return pi
    raise NoConvergence(f"stationary distribution did not converge in {max_iter} iterations",
                        iterations=max_iter)


def dominant_eigenvalue(Q, start=None, tol=1e-12, max_iter=DEFAULT_MAX_ITER):
    """Perron root of a nonnegative matrix by shifted power iteration.

    Iterates on ``Q + s I`` with ``s`` the largest column sum, which keeps the
    Perron root strictly dominant even for periodic matrices. Returns
    ``(lambda1, vector, iterations)``; converged when
    ``||Q v - lambda v||_1 < tol * lambda * ||v||_1``.
    """
    Q = np.asarray(Q, dtype=float)
    L = Q.shape[0]
    shift = float(Q.sum(axis=0).max())
    v = np.full(L, 1.0 / L) if start is None else np.asarray(start, dtype=float).copy()
    v /= v.sum()
    lam = 0.0
    for it in range(1, max_iter + 1):
        Qv = Q @ v
        lam = Qv.sum() / v.sum()
        if lam > 0 and np.abs(Qv - lam * v).sum() < tol * lam * v.sum():
            return lam, v, it
        v = Qv + shift * v
        v /= v.sum()
    raise NoConvergence(f"power iteration did not converge in {max_iter} iterations",
                        iterations=max_iter)


def perron_root(Q):
    """Spectral radius of a nonnegative irreducible matrix and its positive vector."""
    w, V = eig(Q)
    i = int(np.argmax(np.abs(w)))
    v = np.abs(np.real(V[:, i]))
    return float(np.max(np.abs(w))), v / v.sum()


def growth_rate(chain, tol=1e-13, max_iter=DEFAULT_MAX_ITER, with_pi=True, method="auto"):
    """Asymptotic growth ``g = ln lambda1`` of E[S(n)] for the chain.

    ``method="dense"`` takes the spectral radius from a full eigen-solve,
    ``"power"`` uses shifted power iteration started from the unit vector on
    the target, so for a reducible chain it reports the rate seen from the
    target portfolio. ``"auto"`` picks dense for irreducible chains of at
    most ``DENSE_LIMIT`` states.
    """
    if method == "auto":
        method = "dense" if chain.irreducible and chain.L <= DENSE_LIMIT else "power"
    if method == "dense":
        lam, _ = perron_root(chain.Q)
        iters = 0
    elif method == "power":
        start = np.zeros(chain.L)
        start[chain.space.target_index] = 1.0
        lam, _, iters = dominant_eigenvalue(chain.Q, start, tol, max_iter)
    else:
        raise ValueError(f"unknown method {method!r}")
    pi = stationary_distribution(chain, tol, max_iter) if with_pi else None
    return GrowthReport(lam, math.log(lam), pi, iters)
