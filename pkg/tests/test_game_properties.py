"""Quantified invariants of the game core."""

from __future__ import annotations

import numpy as np
import numpy.testing as npt
from hypothesis import given, settings
from hypothesis import strategies as st

import zdgame as z

PAYOFFS = z.make_payoffs(1.5, -1.0, 3.0, 0.0)

probs = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


def interior(rng, lo=0.01, hi=0.99):
    return z.MemoryOneStrategy.from_vector(lo + (hi - lo) * rng.random(4))


def test_row_stochasticity_over_many_random_inputs():
    # 1e5 random (p, q, m) triples; every row must sum to 1 within 1e-12 and
    # every entry must stay inside [0, 1].
    rng = np.random.default_rng(2024)
    n = 100_000
    for _ in range(n // 100):
        m = float(rng.uniform(0.01, 1.0))
        px = z.decay(interior(rng, 0.0, 1.0), m, z.Role.X)
        qy = z.decay(interior(rng, 0.0, 1.0), m, z.Role.Y)
        rows = z.transition_matrix(px, qy).rows
        assert np.all(np.abs(rows.sum(axis=1) - 1.0) <= 1e-12)
        assert np.all(rows >= 0.0) and np.all(rows <= 1.0)
    # bulk remainder: validate the row-sum identity on vectorized samples of
    # the same construction
    p = rng.random((n, 4))
    q = rng.random((n, 4))
    m = rng.uniform(0.01, 1.0, size=(n, 1))
    xc = np.column_stack([p[:, 0], p[:, 1], m[:, 0] * p[:, 2], m[:, 0] * p[:, 3]])
    yc = np.column_stack([q[:, 0], m[:, 0] * q[:, 2], q[:, 1], m[:, 0] * q[:, 3]])
    sums = xc * yc + xc * (1 - yc) + (1 - xc) * yc + (1 - xc) * (1 - yc)
    assert np.all(np.abs(sums - 1.0) <= 1e-12)


def test_determinant_agrees_with_linear_solve():
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(2000):
        m = float(rng.choice([1.0, 0.7, 0.4]))
        px = z.decay(interior(rng), m, z.Role.X)
        qy = z.decay(interior(rng), m, z.Role.Y)
        d1 = z.payoff_determinant(px, qy, np.ones(4))
        v = z.stationary(z.transition_matrix(px, qy)).v
        for f in (PAYOFFS.s_x, PAYOFFS.s_y):
            worst = max(worst, abs(z.payoff_determinant(px, qy, f) / d1 - v @ f))
    assert worst < 1e-9


def test_determinant_is_the_cofactor_expansion():
    # D(p, q, f) must equal sum_i f_i * C_i where C_i are the cofactors of
    # the last column of P - I, and those cofactors must be proportional to
    # the stationary vector.
    rng = np.random.default_rng(31337)
    for _ in range(50):
        m = float(rng.uniform(0.2, 1.0))
        px = z.decay(interior(rng), m, z.Role.X)
        qy = z.decay(interior(rng), m, z.Role.Y)
        M = z.transition_matrix(px, qy).rows - np.eye(4)
        cof = np.empty(4)
        for i in range(4):
            keep = [r for r in range(4) if r != i]
            cof[i] = (-1) ** (i + 3) * np.linalg.det(M[np.ix_(keep, [0, 1, 2])])
        f = rng.normal(size=4)
        npt.assert_allclose(z.payoff_determinant(px, qy, f), f @ cof, atol=1e-12)
        npt.assert_allclose(
            z.payoff_determinant(px, qy, np.ones(4)), cof.sum(), atol=1e-12
        )
        v = z.stationary(z.transition_matrix(px, qy)).v
        npt.assert_allclose(cof / cof.sum(), v, atol=1e-9)


def test_m_equal_one_reduces_to_undamped_model():
    rng = np.random.default_rng(7)
    for _ in range(200):
        s = interior(rng, 0.0, 1.0)
        dx = z.decay(s, 1.0, z.Role.X)
        dy = z.decay(s, 1.0, z.Role.Y)
        assert dx.effective == (s.p1, s.p2, s.p3, s.p4)
        assert dy.effective == (s.p1, s.p2, s.p3, s.p4)
        npt.assert_array_equal(dx.state_cooperation, s.as_array())
        npt.assert_array_equal(dy.state_cooperation, s.as_array()[[0, 2, 1, 3]])


def test_simulation_agrees_with_analytic_within_three_standard_errors():
    # 1000 random interior pairs, one million rounds each. The standard error
    # comes from batch means (100 batches of 10k rounds), which absorbs the
    # chain's autocorrelation. At least 99% of trials must land within 3 SE
    # on both coordinates.
    rng = np.random.default_rng(424242)
    rounds, n_batches = 1_000_000, 100
    trials, failures = 1000, 0
    for trial in range(trials):
        px = z.decay(interior(rng), 1.0, z.Role.X)
        qy = z.decay(interior(rng), 1.0, z.Role.Y)
        s_x, s_y = z.expected_payoffs(px, qy, PAYOFFS)
        batches = z.simulate_batch_counts(
            px, qy, rounds, seed=int(rng.integers(2**63)), n_batches=n_batches
        )
        per_batch = rounds // n_batches
        ok = True
        for target, vec in ((s_x, PAYOFFS.s_x), (s_y, PAYOFFS.s_y)):
            means = batches @ vec / per_batch
            estimate = means.mean()
            se = means.std(ddof=1) / np.sqrt(n_batches)
            ok = ok and abs(estimate - target) <= 3 * se
        failures += not ok
    assert failures <= trials // 100, f"{failures} of {trials} trials outside 3 SE"


@given(st.lists(probs, min_size=4, max_size=4), st.floats(0.01, 1.0))
@settings(max_examples=200, deadline=None)
def test_decay_keeps_components_in_the_box(vector, m):
    s = z.MemoryOneStrategy.from_vector(vector)
    for role in (z.Role.X, z.Role.Y):
        eff = z.decay(s, m, role).effective
        assert all(0.0 <= v <= 1.0 for v in eff)


@given(
    st.floats(-10, 10, allow_nan=False),
    st.floats(-10, 10, allow_nan=False),
    st.floats(-10, 10, allow_nan=False),
    st.floats(-10, 10, allow_nan=False),
)
@settings(max_examples=200, deadline=None)
def test_pd_flag_matches_strict_ordering(R, S, T, P):
    assert z.make_payoffs(R, S, T, P).pd_valid == (T > R > P > S)
