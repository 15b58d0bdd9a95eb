"""Achievable-portfolio state space of a two-asset threshold rebalanced portfolio.

While no rebalancing happens the allocation in asset 1 is a function of the
running sum ``s`` of log-ratios ``Z(n) = ln(X2(n) / X1(n))``::

    1 / b(n) = 1 + (1 - b) / b * exp(s)

so states are identified by their log offset ``s``; offset 0 is the target
``b``. The allocation stays inside ``(b - eps, b + eps)`` exactly while ``s``
stays inside ``(alpha2, alpha1)``.
"""

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .exceptions import StateCapExceeded, TechnicalConditionViolated, ToleranceTooCoarse

OFFSET_ATOL = 1e-12
DEFAULT_RATIONAL_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class LogRatioAlphabet:
    """Distinct values the one-period log-ratio can take, sorted ascending.

    ``probs`` holds Pr(Z = z) for each value (``None`` when the alphabet
    was built from bare numbers).
    """

    values: np.ndarray
    probs: np.ndarray = None

    @property
    def positive_part(self):
        """Distinct magnitudes ``|z|``; equals ``{z >= 0}`` for symmetric alphabets."""
        return _unique_sorted(np.abs(self.values))

    @property
    def M(self):
        return len(self.values)

    @classmethod
    def from_values(cls, values):
        return cls(_unique_sorted(np.asarray(values, dtype=float)))


@dataclass(frozen=True)
class IntervalBounds:
    alpha1: float
    alpha2: float

    def contains(self, s):
        return (s > self.alpha2) & (s < self.alpha1)


@dataclass(frozen=True, eq=False)
class StateSpace:
    """Achievable portfolios.

    ``states[i]`` is the asset-1 fraction at log offset ``offsets[i]``.
    ``lattice[i]`` is the integer ``j`` with ``offsets[i] = j * lattice_step``
    when the step is finite. ``finite`` is False only for a truncated
    enumeration.
    """

    params: object
    states: np.ndarray
    offsets: np.ndarray
    lattice_step: float
    finite: bool
    target_index: int
    bounds: IntervalBounds
    lattice: np.ndarray = None

    @property
    def L(self):
        return len(self.states)

    def index_of_offset(self, offset, atol=1e-9):
        hits = np.flatnonzero(np.abs(self.offsets - offset) <= atol)
        return int(hits[0]) if hits.size else None

    def to_rows(self):
        return [(i, float(p), float(s)) for i, (p, s) in enumerate(zip(self.states, self.offsets))]


def _unique_sorted(values, atol=OFFSET_ATOL):
    values = np.sort(np.asarray(values, dtype=float).ravel())
    if values.size == 0:
        return values
    keep = np.concatenate([[True], np.diff(values) > atol])
    return values[keep]


def portfolio_at(b, offset):
    """Asset-1 fraction reached from ``b`` after log offset ``offset``."""
    offset = np.asarray(offset, dtype=float)
    out = np.where(offset == 0, b, 1.0 / (1.0 + (1.0 - b) / b * np.exp(offset)))
    return out if out.ndim else float(out)


def log_ratio_alphabet(market, support_only=True):
    """Log-ratio alphabet of a two-asset market.

    With ``support_only`` (default) only pairs carrying positive probability
    contribute, which is what drives the portfolio dynamics; otherwise every
    ordered pair of atoms is used.
    """
    if support_only:
        x1, p1 = market.support(0)
        x2, p2 = market.support(1)
        z = np.log(x2[None, :] / x1[:, None]).ravel()
        w = (p1[:, None] * p2[None, :]).ravel()
    else:
        x = market.samples
        z = np.log(x[None, :] / x[:, None]).ravel()
        w = None
    keys = np.round(z / OFFSET_ATOL).astype(np.int64)
    uniq, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    values = z[first]
    probs = None if w is None else np.bincount(inverse, weights=w, minlength=uniq.size)
    return LogRatioAlphabet(values, probs)


def interval_bounds(params):
    b, eps = params.b, params.epsilon
    alpha1 = math.log(b * (1 - b + eps) / ((1 - b) * (b - eps)))
    alpha2 = math.log(b * (1 - b - eps) / ((1 - b) * (b + eps)))
    return IntervalBounds(alpha1, alpha2)


def technical_condition_holds(alphabet, bounds):
    """True when every log-ratio magnitude is below ``min(|alpha1|, |alpha2|)``."""
    limit = min(abs(bounds.alpha1), abs(bounds.alpha2))
    return bool(np.all(alphabet.positive_part < limit))


def _max_denominator(rational_tolerance):
    return max(1, int(round(rational_tolerance ** (-1.0 / 3.0))))


def lattice_decomposition(alphabet, rational_tolerance=DEFAULT_RATIONAL_TOLERANCE):
    """Return ``(delta, multipliers)`` with ``|z_i| ~= multipliers[i] * delta``.

    Ratios of the positive magnitudes to the smallest one are approximated
    by continued-fraction convergents with denominators capped at
    ``tol ** (-1/3)``; a ratio without such an approximation within
    ``tol`` (relative) makes the alphabet incommensurable and ``delta`` is
    ``inf``. ``delta`` is also ``inf`` when no nonzero magnitude exists.
    """
    mags = alphabet.positive_part
    mags = mags[mags > OFFSET_ATOL]
    if mags.size == 0:
        return math.inf, np.zeros(0, dtype=np.int64)
    ref = float(mags[0])
    qmax = _max_denominator(rational_tolerance)
    fracs = []
    for z in mags:
        r = float(z) / ref
        f = Fraction(r).limit_denominator(qmax)
        if abs(float(f) - r) > rational_tolerance * r:
            return math.inf, None
        fracs.append(f)
    common = reduce(math.lcm, (f.denominator for f in fracs), 1)
    numer = [f.numerator * (common // f.denominator) for f in fracs]
    g = reduce(math.gcd, numer)
    mult = np.array([n // g for n in numer], dtype=np.int64)
    # least-squares fit of the common step to all magnitudes
    delta = float(mult @ mags) / float(mult @ mult)
    return delta, mult


def lattice_step(alphabet, rational_tolerance=DEFAULT_RATIONAL_TOLERANCE, bounds=None):
    """Smallest positive integer combination of the log-ratios, or ``inf``.

    When ``bounds`` is given, raises ToleranceTooCoarse if an interval end
    falls so close to a lattice point that the approximation error could
    flip whether that point is inside.
    """
    delta, mult = lattice_decomposition(alphabet, rational_tolerance)
    if math.isinf(delta) or bounds is None:
        return delta
    mags = alphabet.positive_part
    mags = mags[mags > OFFSET_ATOL]
    rel_err = float(np.max(np.abs(mult * delta - mags) / mags))
    for alpha in (bounds.alpha1, bounds.alpha2):
        t = alpha / delta
        gap = abs(t - round(t)) * delta
        if gap <= rel_err * abs(alpha) + 4 * np.finfo(float).eps * abs(alpha):
            raise ToleranceTooCoarse(
                f"lattice point {round(t)} * {delta:.6g} is within rounding of the interval end {alpha:.6g}"
            )
    return delta


def lattice_point_count(bounds, delta):
    """Number of integers ``j`` with ``alpha2 < j * delta < alpha1``."""
    hi = math.ceil(bounds.alpha1 / delta) - 1
    lo = math.floor(bounds.alpha2 / delta) + 1
    return hi - lo + 1


def floor_state_count(bounds, delta):
    """The closed-form count ``floor((alpha1 - alpha2) / delta)``.

    This can undercount :func:`lattice_point_count` by one; the two agree
    exactly when the fractional parts of ``alpha1 / delta`` and
    ``-alpha2 / delta`` sum to at least one.
    """
    return math.floor((bounds.alpha1 - bounds.alpha2) / delta)


def enumerate_states(params, alphabet, max_states=10_000,
                     rational_tolerance=DEFAULT_RATIONAL_TOLERANCE):
    """Enumerate the achievable portfolios of TRP(b, eps).

    With a finite lattice step the closure of offset 0 under the alphabet's
    moves is taken on the integer lattice; a closure larger than
    ``max_states`` raises StateCapExceeded. With incommensurable log-ratios
    the closure is explored most-probable-first and truncated at
    ``max_states`` (``finite=False``).
    """
    bounds = interval_bounds(params)
    if not technical_condition_holds(alphabet, bounds):
        raise TechnicalConditionViolated(
            f"max |z| = {float(np.max(np.abs(alphabet.values))):.6g} is not below "
            f"min(|alpha1|, |alpha2|) = {min(bounds.alpha1, -bounds.alpha2):.6g}"
        )
    delta = lattice_step(alphabet, rational_tolerance, bounds)
    if math.isinf(delta):
        return _enumerate_real(params, alphabet, bounds, max_states)

    moves = np.unique(np.round(alphabet.values / delta).astype(np.int64))
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for j in frontier:
            for m in moves:
                jj = int(j + m)
                if jj in seen or not (bounds.alpha2 < jj * delta < bounds.alpha1):
                    continue
                seen.add(jj)
                nxt.append(jj)
        if len(seen) > max_states:
            partial = _make_space(params, sorted(seen), delta, True, bounds)
            raise StateCapExceeded(
                f"finite state space exceeds max_states={max_states}", partial=partial
            )
        frontier = nxt
    return _make_space(params, sorted(seen), delta, True, bounds)


def _make_space(params, lattice, delta, finite, bounds):
    lattice = sorted(lattice, key=lambda j: (j != 0, j))
    lat = np.array(lattice, dtype=np.int64)
    offsets = lat * delta
    return StateSpace(params, portfolio_at(params.b, offsets), offsets, delta, finite, 0,
                      bounds, lat)


def _enumerate_real(params, alphabet, bounds, max_states):
    moves = alphabet.values
    probs = alphabet.probs if alphabet.probs is not None else np.full(moves.size, 1.0 / moves.size)
    logp = np.log(np.maximum(probs, 1e-300))
    best = {0: 0.0}
    offsets = {0: 0.0}
    done = set()
    heap = [(-0.0, 0)]
    while heap and len(done) < max_states:
        neg_lp, key = heapq.heappop(heap)
        if key in done:
            continue
        done.add(key)
        s = offsets[key]
        for z, lp in zip(moves, logp):
            t = s + z
            if not bounds.alpha2 < t < bounds.alpha1:
                continue
            k2 = int(round(t / OFFSET_ATOL))
            cand = -neg_lp + lp
            if k2 in done or cand <= best.get(k2, -math.inf):
                continue
            best[k2] = cand
            offsets.setdefault(k2, t)
            heapq.heappush(heap, (-cand, k2))
    finite = not any(k not in done for _, k in heap)
    keys = sorted(done, key=lambda k: (k != 0, offsets[k]))
    offs = np.array([offsets[k] for k in keys])
    return StateSpace(params, portfolio_at(params.b, offs), offs, math.inf, finite, 0, bounds,
                      None)


def constructive_walk(target_index, space, alphabet):
    """Build a log-ratio sequence ending at lattice point ``target_index``
    whose partial sums never leave ``(alpha2, alpha1)``.

    Follows the alternating correction argument: write the target as an
    integer combination of the positive log-ratios, then repeatedly step
    down while the running sum is non-negative and up while it is negative,
    and flush the remaining same-sign steps once one sign is used up.
    Requires a symmetric alphabet and a finite lattice step.
    """
    delta = space.lattice_step
    mags = alphabet.positive_part
    mags = mags[mags > OFFSET_ATOL]
    mult = [int(round(z / delta)) for z in mags]
    coeffs = _integer_combination(mult, int(target_index))
    steps = []
    s = 0
    remaining = dict(enumerate(coeffs))
    while any(remaining.values()):
        if s >= 0:
            neg = [i for i, c in remaining.items() if c < 0]
            if neg:
                i = neg[0]
                remaining[i] += 1
                steps.append(-mult[i])
                s -= mult[i]
                continue
            for i, c in remaining.items():
                steps.extend([mult[i]] * c)
                remaining[i] = 0
        else:
            pos = [i for i, c in remaining.items() if c > 0]
            if pos:
                i = pos[0]
                remaining[i] -= 1
                steps.append(mult[i])
                s += mult[i]
                continue
            for i, c in remaining.items():
                steps.extend([-mult[i]] * (-c))
                remaining[i] = 0
    return [k * delta for k in steps]


def _integer_combination(mult, target):
    """Integers ``c`` with ``sum(c_i * mult_i) == target`` (extended Euclid)."""
    coeffs = [0] * len(mult)
    if target == 0:
        return coeffs
    g, running = mult[0], [1] + [0] * (len(mult) - 1)
    for i in range(1, len(mult)):
        g2, x, y = _egcd(g, mult[i])
        running = [x * c for c in running]
        running[i] = y
        g = g2
    if target % g:
        raise ValueError(f"{target} is not a combination of {mult}")
    scale = target // g
    return [c * scale for c in running]


def _egcd(a, b):
    if b == 0:
        return a, 1, 0
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y
