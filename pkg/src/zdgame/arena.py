"""Payoff-cloud experiments: one fixed strategy versus many random opponents.

Every opponent gets its own deterministic random stream derived from the
experiment's master seed, so results are bit-identical regardless of how the
work is split across processes. The stream layout per opponent index i is:

    seed_i  = splitmix64(master_seed, i)       (see ``derive_seed``)
    stream  = PCG64(seed_i)
    draws 1-4   the opponent's four cooperation probabilities
    draws 5+    simulation uniforms, consumed only when a point simulates

Analytic points that hit a reducible chain fall back to a 100,000-round
simulation with a 10,000-round burn-in and are flagged degenerate.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateCloud, DegenerateGame, DomainError
from .game import (
    GamePayoffs,
    MemoryOneStrategy,
    Role,
    SolveMethod,
    _walk,
    analytic_payoffs,
    decay,
    make_payoffs,
    payoffs_from_donation,
)
from .strategies import NamedStrategy, allc, alld, wsls
from .zd import DonationParams, ZDStrategy, equalizer_from_payoffs, extortion_strategy

__all__ = [
    "ExperimentSpec",
    "CloudDiagnostics",
    "PayoffCloud",
    "FigureResult",
    "derive_seed",
    "run_cloud",
    "analyze_cloud",
    "reproduce_figure",
    "FIGURE_IDS",
]

#: Max orthogonal distance from the best-fit line for a cloud to count as a line.
COLLINEAR_TOL = 1e-6
#: Rounds and burn-in used when an analytic point must fall back to simulation.
FALLBACK_ROUNDS = 100_000
FALLBACK_BURN_IN = 10_000

_CHUNK = 4096
_MASK64 = 0xFFFFFFFFFFFFFFFF
_METHODS = (SolveMethod.DETERMINANT, SolveMethod.LINEAR_SOLVE, SolveMethod.TIME_AVERAGE)

FIGURE_IDS = (2, 3, 4, 5)


def derive_seed(master: int, index: int) -> int:
    """Mix (master seed, opponent index) into an independent 64-bit seed.

    splitmix64 finalizer over master + (index + 1) * 0x9E3779B97F4A7C15, all
    arithmetic mod 2**64. Fixed for all time: changing it changes every
    experiment's opponents.
    """
    z = (int(master) + (int(index) + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class ExperimentSpec:
    """One fixed X strategy against n random opponents.

    mode is "analytic" (stationary payoffs, with simulation fallback for
    degenerate points) or "simulated" (time averages over ``rounds`` rounds
    per opponent).
    """

    x_strategy: MemoryOneStrategy | NamedStrategy | ZDStrategy
    n_opponents: int
    payoffs: GamePayoffs
    master_seed: int
    m: float = 1.0
    mode: str = "analytic"
    rounds: int | None = None

    def __post_init__(self):
        if self.n_opponents < 1:
            raise DomainError(f"n_opponents must be >= 1, got {self.n_opponents}")
        if self.mode not in ("analytic", "simulated"):
            raise DomainError(f"mode must be 'analytic' or 'simulated', got {self.mode!r}")
        if self.mode == "simulated" and (self.rounds is None or self.rounds < 1):
            raise DomainError("simulated mode needs rounds >= 1")
        if not (0.0 < self.m <= 1.0):
            raise DomainError(f"decay factor m = {self.m!r} must be in (0, 1]")

    @property
    def x_vector(self) -> MemoryOneStrategy:
        x = self.x_strategy
        if isinstance(x, NamedStrategy):
            return x.strategy
        if isinstance(x, ZDStrategy):
            return x.strategy
        return x

    @property
    def x_label(self) -> str:
        x = self.x_strategy
        if isinstance(x, NamedStrategy):
            return x.name
        if isinstance(x, ZDStrategy):
            return x.kind.value
        return "custom"


@dataclass(frozen=True)
class CloudDiagnostics:
    """Shape summary of a payoff cloud.

    ``line`` is (slope, intercept, max_residual) of the total-least-squares
    fit, or None when the points coincide (or the fit is vertical, in which
    case slope is inf and intercept is the common x value).
    """

    collinear: bool
    line: tuple[float, float, float] | None
    hull_area: float
    dominance_fraction: float


@dataclass(frozen=True)
class PayoffCloud:
    """Payoff pairs for every opponent plus diagnostics.

    Arrays are aligned by opponent index: opponents is (n, 4), the rest are
    length n. ``method`` holds the per-point solve route; ``degenerate``
    marks points that needed the simulation fallback in analytic mode.
    """

    opponents: np.ndarray
    sx: np.ndarray
    sy: np.ndarray
    degenerate: np.ndarray
    method: np.ndarray
    diagnostics: CloudDiagnostics

    @property
    def points(self):
        """Iterate (s_x, s_y, opponent_strategy, degenerate_flag) tuples."""
        for i in range(len(self.sx)):
            yield (
                float(self.sx[i]),
                float(self.sy[i]),
                tuple(self.opponents[i]),
                bool(self.degenerate[i]),
            )

    def __len__(self) -> int:
        return len(self.sx)


def _eval_chunk(args):
    """Evaluate opponents [start, stop) of an experiment; standalone for pickling."""
    x, m, rstp, mode, rounds, master_seed, start, stop = args
    payoffs = make_payoffs(*rstp)
    px = decay(MemoryOneStrategy.from_vector(x), m, Role.X)
    xc = px.state_cooperation
    n = stop - start
    q_out = np.empty((n, 4))
    sx = np.empty(n)
    sy = np.empty(n)
    deg = np.zeros(n, dtype=bool)
    meth = np.empty(n, dtype=np.uint8)
    sx_vec = payoffs.s_x
    sy_vec = payoffs.s_y
    for k in range(n):
        rng = np.random.default_rng(derive_seed(master_seed, start + k))
        q = rng.random(4)
        q_out[k] = q
        qy = decay(MemoryOneStrategy.from_vector(q), m, Role.Y)
        if mode == "analytic":
            try:
                a, b, method = analytic_payoffs(px, qy, payoffs)
                sx[k], sy[k], meth[k] = a, b, _METHODS.index(method)
                continue
            except DegenerateGame:
                deg[k] = True
                sim_rounds, burn = FALLBACK_ROUNDS, FALLBACK_BURN_IN
        else:
            sim_rounds, burn = rounds, 0
        u = rng.random((sim_rounds, 2))
        yc = qy.state_cooperation
        state = 0
        if burn:
            _, state = _walk(xc, yc, u[:burn], state)
        counts, _ = _walk(xc, yc, u[burn:], state)
        counted = sim_rounds - burn
        sx[k] = float(counts @ sx_vec) / counted
        sy[k] = float(counts @ sy_vec) / counted
        meth[k] = _METHODS.index(SolveMethod.TIME_AVERAGE)
    return q_out, sx, sy, deg, meth


def run_cloud(spec: ExperimentSpec, workers: int = 1) -> PayoffCloud:
    """Evaluate the experiment, optionally across processes.

    Results are identical for any worker count: every opponent is a pure
    function of (master_seed, index).
    """
    base = spec.x_vector
    payload = (
        (base.p1, base.p2, base.p3, base.p4),
        spec.m,
        (spec.payoffs.R, spec.payoffs.S, spec.payoffs.T, spec.payoffs.P),
        spec.mode,
        spec.rounds,
        spec.master_seed,
    )
    bounds = list(range(0, spec.n_opponents, _CHUNK)) + [spec.n_opponents]
    jobs = [payload + (bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_eval_chunk, jobs))
    else:
        parts = [_eval_chunk(job) for job in jobs]
    opponents = np.concatenate([p[0] for p in parts])
    sx = np.concatenate([p[1] for p in parts])
    sy = np.concatenate([p[2] for p in parts])
    deg = np.concatenate([p[3] for p in parts])
    meth_codes = np.concatenate([p[4] for p in parts])
    method = np.array([_METHODS[c].value for c in meth_codes], dtype="U13")
    if len(sx) >= 2:
        diagnostics = analyze_cloud(np.column_stack([sx, sy]))
    else:
        diagnostics = CloudDiagnostics(
            collinear=True, line=None, hull_area=0.0, dominance_fraction=float(sx[0] >= sy[0])
        )
    return PayoffCloud(
        opponents=opponents,
        sx=sx,
        sy=sy,
        degenerate=deg,
        method=method,
        diagnostics=diagnostics,
    )


def _hull_area(points: np.ndarray) -> float:
    """Convex hull area of 2D points via the monotone chain, shoelace formula."""
    pts = np.unique(points, axis=0)
    if len(pts) < 3:
        return 0.0

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    pts_list = [tuple(p) for p in pts]
    lower: list[tuple[float, float]] = []
    for p in pts_list:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts_list):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return 0.0
    xs = np.array([p[0] for p in hull])
    ys = np.array([p[1] for p in hull])
    return 0.5 * abs(float(np.dot(xs, np.roll(ys, 1)) - np.dot(ys, np.roll(xs, 1))))


def analyze_cloud(points: np.ndarray) -> CloudDiagnostics:
    """Line fit, hull area, and dominance fraction for an (n, 2) point cloud.

    The line is the total-least-squares (orthogonal) fit; the cloud counts
    as collinear when the max orthogonal residual is below COLLINEAR_TOL.
    Coincident clouds get line=None, hull_area=0, collinear=True by
    convention. Raises DegenerateCloud for fewer than 2 points.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DomainError(f"analyze_cloud needs an (n, 2) array, got shape {pts.shape}")
    if len(pts) < 2:
        raise DegenerateCloud(f"need at least 2 points, got {len(pts)}")
    dominance = float(np.mean(pts[:, 0] >= pts[:, 1] - 1e-12))
    mean = pts.mean(axis=0)
    centered = pts - mean
    spread = np.abs(centered).max()
    if spread < 1e-15:
        return CloudDiagnostics(
            collinear=True, line=None, hull_area=0.0, dominance_fraction=dominance
        )
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    direction, normal = vt[0], vt[1]
    max_residual = float(np.abs(centered @ normal).max())
    if abs(direction[0]) > 1e-12 * np.linalg.norm(direction):
        slope = float(direction[1] / direction[0])
        intercept = float(mean[1] - slope * mean[0])
    else:
        slope = float("inf")
        intercept = float(mean[0])
    return CloudDiagnostics(
        collinear=max_residual < COLLINEAR_TOL,
        line=(slope, intercept, max_residual),
        hull_area=_hull_area(pts),
        dominance_fraction=dominance,
    )


@dataclass(frozen=True)
class FigureResult:
    """Output of one bundled experiment preset."""

    figure_id: int
    clouds: tuple[tuple[str, PayoffCloud], ...]
    files: tuple[Path, ...]
    info: dict


#: Preset parameters for the bundled experiments. Presets 2-4 use the
#: standard payoffs (R, S, T, P) = (1.5, -1, 3, 0); preset 5 builds its
#: extortion strategy from the donation game r=6, c=4 and therefore uses the
#: donation-induced payoffs (1, -1, 3, 0).
STANDARD_PAYOFFS = (1.5, -1.0, 3.0, 0.0)
EQUALIZER_PRESET = {"p1": 0.8, "p4": 0.1}
EXTORTION_PRESET = {"s": 0.5, "phi": 0.2, "r": 6.0, "c": 4.0}


def reproduce_figure(
    figure_id: int,
    seed: int,
    out_dir: str | Path,
    *,
    n_opponents: int = 50_000,
    workers: int = 1,
) -> FigureResult:
    """Run a bundled experiment preset and write its CSV and SVG outputs.

    Presets: 2 = wsls vs random (a 2D payoff region), 3 = allc and alld vs
    random (two payoff segments), 4 = equalizer vs random (opponent payoff
    pinned to a horizontal line), 5 = extortion vs random (payoffs on the
    line through (P, P) with slope s).
    """
    from .output import write_cloud_csv, write_scatter_svg

    if figure_id not in FIGURE_IDS:
        raise DomainError(f"figure id must be one of {FIGURE_IDS}, got {figure_id}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payoffs = make_payoffs(*STANDARD_PAYOFFS)
    info: dict = {"payoffs": STANDARD_PAYOFFS}

    def spec_for(x) -> ExperimentSpec:
        return ExperimentSpec(
            x_strategy=x,
            n_opponents=n_opponents,
            payoffs=payoffs,
            master_seed=seed,
            mode="analytic",
        )

    if figure_id == 2:
        clouds = [("wsls", run_cloud(spec_for(wsls()), workers))]
    elif figure_id == 3:
        clouds = [
            ("allc", run_cloud(spec_for(allc()), workers)),
            ("alld", run_cloud(spec_for(alld()), workers)),
        ]
    elif figure_id == 4:
        zd = equalizer_from_payoffs(EQUALIZER_PRESET["p1"], EQUALIZER_PRESET["p4"], payoffs)
        info["predicted_sy"] = zd.predicted
        clouds = [("zd-set", run_cloud(spec_for(zd), workers))]
    else:
        donation = DonationParams(EXTORTION_PRESET["r"], EXTORTION_PRESET["c"])
        payoffs = payoffs_from_donation(donation)
        info["payoffs"] = (payoffs.R, payoffs.S, payoffs.T, payoffs.P)
        zd = extortion_strategy(EXTORTION_PRESET["s"], EXTORTION_PRESET["phi"], donation)
        info["slope"] = zd.predicted
        info["reference_point"] = payoffs.P
        clouds = [("zd-extortion", run_cloud(spec_for(zd), workers))]

    files = []
    for label, cloud in clouds:
        name = "cloud.csv" if len(clouds) == 1 else f"cloud_{label}.csv"
        path = out / name
        write_cloud_csv(path, cloud)
        files.append(path)
    svg_path = out / "cloud.svg"
    write_scatter_svg(
        svg_path,
        [(label, cloud.sx, cloud.sy) for label, cloud in clouds],
        title=f"experiment preset {figure_id}",
    )
    files.append(svg_path)
    return FigureResult(
        figure_id=figure_id,
        clouds=tuple(clouds),
        files=tuple(files),
        info=info,
    )
