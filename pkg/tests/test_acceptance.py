"""Acceptance suite: one test per exit criterion, each printing a pass line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines. Every
tolerance is pinned here; the experiments are deterministic in their seeds.
"""

from __future__ import annotations

import filecmp
import time

import numpy as np

import zdgame as z
from zdgame.cli import main

STD_PAYOFFS = z.make_payoffs(1.5, -1.0, 3.0, 0.0)
DON = z.DonationParams(6, 4)
DON_PAYOFFS = z.payoffs_from_donation(DON)


def _report(num: int, description: str, elapsed: float | None = None) -> None:
    timing = f" [{elapsed:.1f}s]" if elapsed is not None else ""
    print(f"\nPASS criterion {num}: {description}{timing}")


def _interior(rng) -> z.MemoryOneStrategy:
    return z.MemoryOneStrategy.from_vector(0.01 + 0.98 * rng.random(4))


def test_criterion_1_determinant_matches_linear_solve():
    # 10,000 random interior pairs, half undamped and half at m = 0.7; the
    # determinant-ratio payoffs must match the stationary linear solve within
    # 1e-9, in under 10 seconds.
    start = time.time()
    rng = np.random.default_rng(20260811)
    worst = 0.0
    for m in (1.0, 0.7):
        for _ in range(5000):
            px = z.decay(_interior(rng), m, z.Role.X)
            qy = z.decay(_interior(rng), m, z.Role.Y)
            d_one = z.payoff_determinant(px, qy, np.ones(4))
            v = z.stationary(z.transition_matrix(px, qy)).v
            for f in (STD_PAYOFFS.s_x, STD_PAYOFFS.s_y):
                worst = max(worst, abs(z.payoff_determinant(px, qy, f) / d_one - v @ f))
    elapsed = time.time() - start
    assert worst < 1e-9, f"worst determinant vs linear-solve gap {worst:.3e}"
    assert elapsed < 10.0, f"runtime {elapsed:.1f}s exceeds 10s"
    _report(1, f"determinant payoffs match linear solve (worst gap {worst:.2e})", elapsed)


def test_criterion_2_simulation_matches_analytic():
    # 200 random pairs, one million simulated rounds each; simulated payoffs
    # must fall within 3 estimated standard errors (batch means over the
    # state counts) of the analytic payoffs in at least 99% of trials, in
    # under 60 seconds.
    start = time.time()
    rng = np.random.default_rng(1234)
    rounds, n_batches = 1_000_000, 100
    per_batch = rounds // n_batches
    trials, failures = 200, 0
    for _ in range(trials):
        px = z.decay(_interior(rng), 1.0, z.Role.X)
        qy = z.decay(_interior(rng), 1.0, z.Role.Y)
        s_x, s_y = z.expected_payoffs(px, qy, STD_PAYOFFS)
        batches = z.simulate_batch_counts(
            px, qy, rounds, seed=int(rng.integers(2**63)), n_batches=n_batches
        )
        ok = True
        for target, vec in ((s_x, STD_PAYOFFS.s_x), (s_y, STD_PAYOFFS.s_y)):
            means = batches @ vec / per_batch
            se = means.std(ddof=1) / np.sqrt(n_batches)
            ok = ok and abs(means.mean() - target) <= 3 * se
        failures += not ok
    elapsed = time.time() - start
    assert failures <= trials // 100, f"{failures}/{trials} trials outside 3 SE"
    assert elapsed < 60.0, f"runtime {elapsed:.1f}s exceeds 60s"
    _report(
        2,
        f"simulation within 3 SE of analytic in {trials - failures}/{trials} trials",
        elapsed,
    )


def test_criterion_3_equalizer_preset_pins_the_opponent(tmp_path):
    # The bundled equalizer preset against 50,000 random opponents: every
    # opponent payoff within 1e-9 of the prediction, and the emitted cloud is
    # a horizontal line per the diagnostics. Under 30 seconds.
    start = time.time()
    result = z.reproduce_figure(4, seed=7, out_dir=tmp_path, n_opponents=50_000)
    (_, cloud), = result.clouds
    predicted = result.info["predicted_sy"]
    deviation = float(np.abs(cloud.sy - predicted).max())
    elapsed = time.time() - start
    assert len(cloud) == 50_000
    assert deviation < 1e-9, f"max |s_y - predicted| = {deviation:.3e}"
    assert cloud.diagnostics.collinear
    slope = cloud.diagnostics.line[0]
    assert abs(slope) < 1e-9, f"slope {slope:.3e} not horizontal"
    assert elapsed < 30.0, f"runtime {elapsed:.1f}s exceeds 30s"
    _report(
        3,
        f"equalizer pins opponent at {predicted:.4f} over 50k opponents "
        f"(max deviation {deviation:.2e}, slope {slope:.2e})",
        elapsed,
    )


def test_criterion_4_extortion_preset_enforces_the_surplus_line(tmp_path):
    # Extortion with s = 0.5, phi = 0.2 over the donation game r = 6, c = 4:
    # the surplus relation holds within 1e-9 across 50,000 opponents, and the
    # extortioner never earns less whenever it clears the reference point.
    start = time.time()
    result = z.reproduce_figure(5, seed=7, out_dir=tmp_path, n_opponents=50_000)
    (_, cloud), = result.clouds
    s = result.info["slope"]
    P = result.info["reference_point"]
    residual = float(np.abs(s * (cloud.sx - P) - (cloud.sy - P)).max())
    above = cloud.sx >= P
    dominance_ok = bool(np.all(cloud.sy[above] <= cloud.sx[above] + 1e-12))
    elapsed = time.time() - start
    assert len(cloud) == 50_000
    assert residual < 1e-9, f"max surplus-relation residual {residual:.3e}"
    assert dominance_ok, "an opponent above the reference point out-earned the extortioner"
    _report(
        4,
        f"extortion surplus line s={s} holds over 50k opponents "
        f"(max residual {residual:.2e}, dominance everywhere above P)",
        elapsed,
    )


def test_criterion_5_region_and_segment_presets(tmp_path):
    # wsls versus random opponents covers a genuine 2D region (hull area
    # above 0.1); unconditional cooperation and defection collapse onto their
    # exact payoff segments within 1e-9.
    start = time.time()
    result2 = z.reproduce_figure(2, seed=11, out_dir=tmp_path / "f2", n_opponents=50_000)
    (_, wsls_cloud), = result2.clouds
    hull = wsls_cloud.diagnostics.hull_area
    assert hull > 0.1, f"wsls hull area {hull:.4f} not a 2D region"
    assert not wsls_cloud.diagnostics.collinear

    result3 = z.reproduce_figure(3, seed=11, out_dir=tmp_path / "f3", n_opponents=50_000)
    segments = {
        "allc": ((1.5, 1.5), (-1.0, 3.0)),
        "alld": ((3.0, -1.0), (0.0, 0.0)),
    }
    worst = 0.0
    for label, cloud in result3.clouds:
        (ax, ay), (bx, by) = segments[label]
        direction = np.array([ax - bx, ay - by])
        normal = np.array([-direction[1], direction[0]]) / np.linalg.norm(direction)
        residual = np.abs((cloud.sx - bx) * normal[0] + (cloud.sy - by) * normal[1])
        worst = max(worst, float(residual.max()))
        assert cloud.diagnostics.collinear
    elapsed = time.time() - start
    assert worst < 1e-9, f"segment residual {worst:.3e}"
    _report(
        5,
        f"wsls hull area {hull:.3f} > 0.1; allc/alld segment residual {worst:.2e}",
        elapsed,
    )


def test_criterion_6_closed_form_cross_check():
    # The donation-form equalizer at (p1, p4) = (0.8, 0.1), r = 6, c = 4 gives
    # p2 = 0.2, p3 = 0.4, prediction 1/3; the general-payoff solver on the
    # same induced payoffs returns the identical strategy within 1e-12.
    eq = z.equalizer_strategy(0.8, 0.1, DON)
    assert abs(eq.strategy.p2 - 0.2) < 1e-12
    assert abs(eq.strategy.p3 - 0.4) < 1e-12
    assert abs(eq.predicted - 1.0 / 3.0) < 1e-12
    general = z.equalizer_from_payoffs(0.8, 0.1, DON_PAYOFFS)
    gap = float(
        np.abs(general.strategy.as_array() - eq.strategy.as_array()).max()
    )
    assert gap < 1e-12
    assert abs(general.predicted - eq.predicted) < 1e-12
    _report(6, f"equalizer closed form and general solver agree (gap {gap:.2e})")


def test_criterion_7_feasibility_boundaries():
    # At the top of the phi range one component sits exactly on the box edge;
    # above the range the error names the violated bound; s outside its range
    # names the valid interval.
    s = 0.5
    hi = z.phi_range(s, DON)[1]
    boundary = z.extortion_strategy(s, hi, DON)
    edge_gap = min(
        min(abs(v) for v in boundary.strategy.as_array()),
        min(abs(v - 1.0) for v in boundary.strategy.as_array()),
    )
    assert edge_gap < 1e-12, f"no component on the box edge at phi = hi (gap {edge_gap:.2e})"

    try:
        z.extortion_strategy(s, hi * 1.01, DON)
    except z.InfeasibleStrategy as err:
        assert "1/(s*(c - r/2) + r/2)" in str(err)
        assert f"{hi:.6g}" in str(err)
    else:
        raise AssertionError("phi above the bound was accepted")

    for bad_s in (-0.5, 1.0):
        try:
            z.extortion_strategy(bad_s, 0.1, DON)
        except z.DomainError as err:
            assert "[-0.333333, 1)" in str(err)
        else:
            raise AssertionError(f"s = {bad_s} was accepted")
    _report(7, "phi boundary sits on the box edge; out-of-range phi and s are named")


def test_criterion_8_hand_computed_matches():
    # Three hand-traced matchups, through the analytic path (with fallback)
    # and through plain simulation.
    cases = [
        ("wsls", "alld", (-0.5, 1.5)),
        ("allc", "alld", (-1.0, 3.0)),
        ("allc", "allc", (1.5, 1.5)),
    ]
    for x_name, y_name, expected in cases:
        px = z.decay(z.named_strategy(x_name).strategy, 1.0, z.Role.X)
        qy = z.decay(z.named_strategy(y_name).strategy, 1.0, z.Role.Y)
        try:
            got = z.expected_payoffs(px, qy, STD_PAYOFFS)
        except z.DegenerateGame:
            s_x, s_y, _ = z.simulate_match(
                px, qy, STD_PAYOFFS, rounds=100_000, seed=1, burn_in=10_000
            )
            got = (s_x, s_y)
        assert abs(got[0] - expected[0]) < 1e-9, f"{x_name} vs {y_name} analytic {got}"
        assert abs(got[1] - expected[1]) < 1e-9

        sim = z.simulate_match(px, qy, STD_PAYOFFS, rounds=1_000_000, seed=2)
        assert abs(sim[0] - expected[0]) < 1e-9, f"{x_name} vs {y_name} simulated {sim}"
        assert abs(sim[1] - expected[1]) < 1e-9
    _report(8, "wsls/alld, allc/alld, allc/allc match hand-traced payoffs on both paths")


def test_criterion_9_figure_runs_are_byte_identical(tmp_path, capsys):
    # The same figure command twice, plus a run split across workers, must
    # emit byte-identical CSV.
    start = time.time()
    dirs = [tmp_path / name for name in ("a", "b", "c")]
    assert main(["figure", "--id", "4", "--seed", "7", "--out", str(dirs[0])]) == 0
    assert main(["figure", "--id", "4", "--seed", "7", "--out", str(dirs[1])]) == 0
    assert (
        main(
            ["figure", "--id", "4", "--seed", "7", "--out", str(dirs[2]), "--workers", "4"]
        )
        == 0
    )
    capsys.readouterr()
    elapsed = time.time() - start
    assert filecmp.cmp(dirs[0] / "cloud.csv", dirs[1] / "cloud.csv", shallow=False)
    assert filecmp.cmp(dirs[0] / "cloud.csv", dirs[2] / "cloud.csv", shallow=False)
    _report(9, "repeated and multi-worker figure runs emit byte-identical CSV", elapsed)
