import itertools
import math

import numpy as np
import pytest

from oracles import brute_force_expected_wealth, brute_force_m_asset
from trpgrowth import (
    StateExplosion,
    TrpParams,
    brownian_market,
    expected_wealth,
    expected_wealth_m_asset,
    iterate_states,
    make_market,
    riskless_market,
)
from trpgrowth.recursion import initial_state, prune, step

K3 = make_market([0.95, 1.0, 1.08], [0.3, 0.4, 0.3], [0.5, 0.2, 0.3])


def test_initial_state():
    s0 = initial_state(TrpParams(0.5, 0.1))
    assert s0.expected_wealth == 1.0 and s0.n_states == 1 and s0.portfolios[0] == 0.5


def test_first_step_brownian():
    m = brownian_market(0.03)
    s1 = step(initial_state(TrpParams(0.5, 0.1)), m, TrpParams(0.5, 0.1))
    assert s1.expected_wealth == pytest.approx(0.5 + 0.5 * math.cosh(0.03), rel=1e-14)
    assert s1.expected_wealth == pytest.approx(1.000225, abs=1e-6)
    assert s1.n_states == 2
    np.testing.assert_allclose(s1.probs, [0.5, 0.5])
    assert np.all((s1.portfolios > 0.4) & (s1.portfolios < 0.6))


def test_riskless_is_flat():
    ew = expected_wealth(riskless_market(), TrpParams(0.5, 0.1, 0.01), 20)
    np.testing.assert_array_equal(ew, np.ones(20))
    for s in iterate_states(riskless_market(), TrpParams(0.5, 0.1, 0.01), 5):
        assert s.n_states == 1


def test_brownian_n6_matches_oracle():
    k = 0.03
    m = brownian_market(k)
    got = expected_wealth(m, TrpParams(0.5, 0.1, 0.01), 6)[-1]
    want = brute_force_expected_wealth(m.samples, m.pmf1, m.pmf2, 0.5, 0.1, 0.01, 6)
    assert got == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("b,eps,c", [(0.5, 0.02, 0.01), (0.3, 0.05, 0.03), (0.7, 0.1, 0.0)])
@pytest.mark.parametrize("n", [1, 3, 5])
def test_oracle_three_atoms(b, eps, c, n):
    got = expected_wealth(K3, TrpParams(b, eps, c), n)[-1]
    want = brute_force_expected_wealth(K3.samples, K3.pmf1, K3.pmf2, b, eps, c, n)
    assert abs(got - want) / want < 1e-10


def test_two_atom_n8_matches_oracle():
    m = make_market([1.0, math.sqrt(2)], [0.6, 0.4], [0.3, 0.7])
    p = TrpParams(0.5, 0.33, 0.02)
    got = expected_wealth(m, p, 8, prune_to=10_000)[-1]
    want = brute_force_expected_wealth(m.samples, m.pmf1, m.pmf2, 0.5, 0.33, 0.02, 8)
    assert abs(got - want) / want < 1e-10


def test_incommensurable_matches_oracle():
    m = make_market([1.0, 1.3, 1.7], [0.2, 0.5, 0.3], [0.4, 0.4, 0.2])
    p = TrpParams(0.45, 0.33, 0.02)
    got = expected_wealth(m, p, 5, prune_to=10_000)[-1]
    want = brute_force_expected_wealth(m.samples, m.pmf1, m.pmf2, 0.45, 0.33, 0.02, 5)
    assert abs(got - want) / want < 1e-10


def test_probability_conservation_and_positivity():
    for s in iterate_states(K3, TrpParams(0.4, 0.1, 0.02), 30):
        assert abs(s.probs.sum() - 1) < 1e-10
        assert np.all(s.weighted_wealth >= 0)
        assert s.expected_wealth == pytest.approx(s.weighted_wealth.sum())


def test_cost_monotone():
    vals = [expected_wealth(K3, TrpParams(0.5, 0.05, c), 12)[-1] for c in np.linspace(0, 0.2, 5)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_never_exit_identity():
    m = make_market([0.99, 1.0, 1.01], [0.2, 0.5, 0.3], [0.4, 0.3, 0.3])
    b, n = 0.5, 6
    ew = expected_wealth(m, TrpParams(b, 0.45, 0.05), n)
    e1, e2 = m.mean(0), m.mean(1)
    want = [b * e1 ** t + (1 - b) * e2 ** t for t in range(1, n + 1)]
    np.testing.assert_allclose(ew, want, rtol=1e-13)


def test_pruning_inactive_on_finite_chain():
    m = brownian_market(0.03)
    p = TrpParams(0.5, 0.1, 0.01)
    a = expected_wealth(m, p, 50)[-1]
    b = expected_wealth(m, p, 50, prune_to=64)[-1]
    assert abs(a - b) / a < 1e-6


def test_pruning_conserves_mass():
    m = make_market([1.0, math.sqrt(2), math.sqrt(3)], [1 / 3] * 3, [1 / 3] * 3)
    p = TrpParams(0.5, 0.3, 0.01)
    full = list(iterate_states(m, p, 6))[-1]
    small = prune(full, 10, p.b)
    assert small.n_states == 10
    assert small.probs.sum() == pytest.approx(full.probs.sum(), rel=1e-14)
    assert small.expected_wealth == pytest.approx(full.expected_wealth, rel=1e-14)


def test_state_explosion():
    m = make_market([1.0, math.sqrt(2), math.sqrt(3)], [1 / 3] * 3, [1 / 3] * 3)
    with pytest.raises(StateExplosion):
        expected_wealth(m, TrpParams(0.5, 0.45, 0.01), 10, max_states=50)


def test_bad_horizon():
    with pytest.raises(ValueError):
        expected_wealth(K3, TrpParams(0.5, 0.1), 0)


def test_m_asset_reduces_to_two_assets():
    for b, eps, c in [(0.5, 0.05, 0.01), (0.3, 0.1, 0.02)]:
        two = expected_wealth(K3, TrpParams(b, eps, c), 6)
        many = expected_wealth_m_asset(K3, [b, 1 - b], eps, c, 6)
        np.testing.assert_allclose(many, two, rtol=1e-12)


def test_m_asset_riskless():
    m = riskless_market(3)
    np.testing.assert_allclose(expected_wealth_m_asset(m, [0.3, 0.3, 0.4], 0.1, 0.01, 5),
                               np.ones(5), rtol=1e-14)


def test_m_asset_matches_oracle():
    m = make_market([0.95, 1.06], [0.5, 0.5], [0.3, 0.7], [0.6, 0.4])
    targets, eps, c = [0.3, 0.3, 0.4], 0.04, 0.02
    got = expected_wealth_m_asset(m, targets, eps, c, 4)[-1]
    want = brute_force_m_asset(m.samples, m.pmfs, targets, eps, c, 4)
    assert abs(got - want) / want < 1e-10


def test_m_asset_validation():
    m = riskless_market(3)
    with pytest.raises(ValueError):
        expected_wealth_m_asset(m, [0.5, 0.5], 0.1, 0.01, 3)
    with pytest.raises(ValueError):
        expected_wealth_m_asset(m, [0.05, 0.5, 0.45], 0.1, 0.01, 3)


def test_wealth_state_rows():
    s = list(iterate_states(brownian_market(0.03), TrpParams(0.5, 0.1), 2))[-1]
    rows = s.to_rows()
    assert len(rows) == s.n_states and rows[0][0] == 2


@pytest.mark.parametrize("n", [1, 2, 4])
def test_vectorised_oracle_matches_loop_oracle(n):
    from oracles import brute_force_expected_wealth_vec
    args = (K3.samples, K3.pmf1, K3.pmf2, 0.45, 0.04, 0.02, n)
    assert brute_force_expected_wealth_vec(*args) == pytest.approx(
        brute_force_expected_wealth(*args), rel=1e-13)
