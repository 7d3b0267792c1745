"""Core machinery for the memory-one iterated prisoner's dilemma.

Two players, X (row) and Y (column), each choose Cooperate or Defect every
round, conditioning only on the previous round's joint outcome. Joint
outcomes are indexed from X's point of view:

    0 = CC, 1 = CD, 2 = DC, 3 = DD   (X's action first)

A decay factor m in (0, 1] damps a player's cooperation probability after
rounds in which that player defected; m = 1 recovers the undamped game.

Long-run payoffs are available three ways, which must agree wherever more
than one applies:

* a 4x4 determinant ratio (``payoff_determinant``), valid whenever the
  normalization determinant is nonzero,
* the stationary vector of the transition matrix (``stationary``), valid
  whenever the chain has a single closed class,
* seeded Monte Carlo time averages (``simulate_match``), always available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum

import numpy as np
from numba import njit

from .errors import DegenerateGame, DomainError, NonUniqueStationary

__all__ = [
    "Action",
    "Outcome",
    "Role",
    "SolveMethod",
    "MemoryOneStrategy",
    "DecayedStrategy",
    "GamePayoffs",
    "DonationParams",
    "TransitionMatrix",
    "StationaryResult",
    "make_payoffs",
    "payoffs_from_donation",
    "decay",
    "transition_matrix",
    "stationary",
    "payoff_determinant",
    "analytic_payoffs",
    "expected_payoffs",
    "simulate_match",
    "simulate_batch_counts",
]

#: Singular values of (P^T - I) below RANK_TOL * sigma_max count as zero.
RANK_TOL = 1e-9
#: Transition matrix rows must sum to 1 within this tolerance.
ROW_SUM_TOL = 1e-12
#: Below this |D(1)| the determinant ratio is too ill-conditioned to trust
#: at the 1e-9 accuracy this package promises; switch to the linear solve.
DET_SWITCH = 1e-4

STATE_LABELS = ("CC", "CD", "DC", "DD")


class Action(IntEnum):
    """A single move. The ordering Cooperate < Defect fixes state indexing."""

    COOPERATE = 0
    DEFECT = 1


class Outcome(IntEnum):
    """Joint outcome of one round, indexed as (X action, Y action)."""

    CC = 0
    CD = 1
    DC = 2
    DD = 3

    @property
    def actions(self) -> tuple[Action, Action]:
        return Action(self.value >> 1), Action(self.value & 1)

    @classmethod
    def from_actions(cls, x: Action, y: Action) -> "Outcome":
        return cls((int(x) << 1) | int(y))


class Role(Enum):
    """Which seat a strategy occupies: X is the row player, Y the column player."""

    X = "X"
    Y = "Y"


class SolveMethod(Enum):
    """How a payoff or stationary vector was obtained."""

    DETERMINANT = "determinant"
    LINEAR_SOLVE = "linear_solve"
    TIME_AVERAGE = "time_average"


def _check_prob(name: str, value: float) -> float:
    v = float(value)
    if not (0.0 <= v <= 1.0) or math.isnan(v):
        raise DomainError(f"{name} = {value!r} is not a probability in [0, 1]")
    return v


@dataclass(frozen=True)
class MemoryOneStrategy:
    """Cooperation probabilities conditioned on the previous joint outcome.

    Components are ordered CC, CD, DC, DD from the owning player's own
    perspective (its action listed first).
    """

    p1: float
    p2: float
    p3: float
    p4: float

    def __post_init__(self):
        for name in ("p1", "p2", "p3", "p4"):
            object.__setattr__(self, name, _check_prob(name, getattr(self, name)))

    @classmethod
    def from_vector(cls, vector) -> "MemoryOneStrategy":
        values = [float(v) for v in vector]
        if len(values) != 4:
            raise DomainError(f"a memory-one strategy needs 4 components, got {len(values)}")
        return cls(*values)

    def as_array(self) -> np.ndarray:
        return np.array([self.p1, self.p2, self.p3, self.p4])


@dataclass(frozen=True)
class DecayedStrategy:
    """A memory-one strategy with the decay factor m applied.

    ``effective`` damps components in place in the conventional listed order:
    the third and fourth for the row player, the second and fourth for the
    column player. The transition dynamics consume ``state_cooperation``,
    which re-expresses the column player's conditioning on the row player's
    state indexing (the column player's CD is the row player's DC), placing
    its damped entries on the row states CD and DD where it defected.
    """

    base: MemoryOneStrategy
    m: float
    role: Role
    effective: tuple[float, float, float, float]

    @property
    def state_cooperation(self) -> np.ndarray:
        """Cooperation probability per row-player state CC, CD, DC, DD."""
        b = self.base
        if self.role is Role.X:
            return np.array([b.p1, b.p2, self.m * b.p3, self.m * b.p4])
        return np.array([b.p1, self.m * b.p3, b.p2, self.m * b.p4])

    @property
    def tilted(self) -> np.ndarray:
        """State cooperation minus the indicator of having cooperated in that state."""
        coop = self.state_cooperation
        if self.role is Role.X:
            return coop - np.array([1.0, 1.0, 0.0, 0.0])
        return coop - np.array([1.0, 0.0, 1.0, 0.0])


def decay(strategy: MemoryOneStrategy, m: float, role: Role) -> DecayedStrategy:
    """Apply the post-defection cooperation decay m to a strategy.

    m = 1 returns the strategy unchanged. Raises DomainError for m outside
    (0, 1].
    """
    m = float(m)
    if not (0.0 < m <= 1.0) or math.isnan(m):
        raise DomainError(f"decay factor m = {m!r} must be in (0, 1]")
    if not isinstance(role, Role):
        raise DomainError(f"role must be Role.X or Role.Y, got {role!r}")
    b = strategy
    if role is Role.X:
        eff = (b.p1, b.p2, m * b.p3, m * b.p4)
    else:
        eff = (b.p1, m * b.p2, b.p3, m * b.p4)
    return DecayedStrategy(base=strategy, m=m, role=role, effective=eff)


@dataclass(frozen=True)
class GamePayoffs:
    """Per-state payoffs for both players.

    X earns (R, S, T, P) over states CC, CD, DC, DD; Y earns the mirrored
    (R, T, S, P). ``pd_valid`` is True exactly when T > R > P > S, the strict
    ordering that makes the one-shot game a prisoner's dilemma.
    """

    R: float
    S: float
    T: float
    P: float

    def __post_init__(self):
        for name in ("R", "S", "T", "P"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise DomainError(f"payoff {name} = {v!r} must be finite")
            object.__setattr__(self, name, v)

    @property
    def s_x(self) -> np.ndarray:
        return np.array([self.R, self.S, self.T, self.P])

    @property
    def s_y(self) -> np.ndarray:
        return np.array([self.R, self.T, self.S, self.P])

    @property
    def pd_valid(self) -> bool:
        return self.T > self.R > self.P > self.S


def make_payoffs(R: float, S: float, T: float, P: float) -> GamePayoffs:
    """Build per-state payoff vectors from the four scalar outcomes."""
    return GamePayoffs(R=R, S=S, T=T, P=P)


@dataclass(frozen=True)
class DonationParams:
    """Benefit r and cost c of the donation parameterization.

    Requires r > c > 0 so the induced mutual-cooperation reward (r - c) / 2
    is positive.
    """

    r: float
    c: float

    def __post_init__(self):
        r, c = float(self.r), float(self.c)
        if not (math.isfinite(r) and math.isfinite(c)):
            raise DomainError("donation parameters must be finite")
        if r <= 0 or c <= 0:
            raise DomainError(f"donation parameters must be positive, got r={r}, c={c}")
        if r <= c:
            raise DomainError(f"donation benefit must exceed cost, got r={r} <= c={c}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "c", c)


def payoffs_from_donation(params: DonationParams) -> GamePayoffs:
    """Payoffs induced by the donation parameterization.

    R = (r - c)/2, S = r/2 - c, T = r/2, P = 0. This is not always a valid
    prisoner's dilemma; check ``pd_valid`` if the ordering matters.
    """
    r, c = params.r, params.c
    return make_payoffs((r - c) / 2.0, r / 2.0 - c, r / 2.0, 0.0)


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic 4x4 matrix over joint outcomes CC, CD, DC, DD."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.shape != (4, 4):
            raise DomainError(f"transition matrix must be 4x4, got {rows.shape}")
        if np.any(rows < -ROW_SUM_TOL) or np.any(rows > 1.0 + ROW_SUM_TOL):
            raise DomainError("transition matrix entries must lie in [0, 1]")
        sums = rows.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL):
            raise DomainError(f"transition matrix rows must sum to 1, got {sums}")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)


def transition_matrix(px: DecayedStrategy, qy: DecayedStrategy) -> TransitionMatrix:
    """Markov matrix of the joint-outcome chain for a decayed strategy pair.

    Row s is the outer product of X's (cooperate, defect) probabilities in
    state s with Y's, in column order CC, CD, DC, DD. Requires px in role X,
    qy in role Y, and matching decay factors.
    """
    if px.role is not Role.X or qy.role is not Role.Y:
        raise DomainError(
            f"transition_matrix needs roles (X, Y), got ({px.role.value}, {qy.role.value})"
        )
    if px.m != qy.m:
        raise DomainError(f"both players must share one decay factor, got {px.m} and {qy.m}")
    xc = px.state_cooperation
    yc = qy.state_cooperation
    rows = np.empty((4, 4))
    rows[:, 0] = xc * yc
    rows[:, 1] = xc * (1.0 - yc)
    rows[:, 2] = (1.0 - xc) * yc
    rows[:, 3] = (1.0 - xc) * (1.0 - yc)
    return TransitionMatrix(rows=rows)


@dataclass(frozen=True)
class StationaryResult:
    """A stationary distribution of the joint-outcome chain."""

    v: np.ndarray
    method: SolveMethod
    unique: bool


def stationary(matrix: TransitionMatrix) -> StationaryResult:
    """Solve v^T P = v^T with sum(v) = 1 via the null space of P^T - I.

    Raises NonUniqueStationary when the chain has multiple closed classes,
    detected as rank(P^T - I) < 3 with singular values below
    RANK_TOL * sigma_max.
    """
    a = matrix.rows.T - np.eye(4)
    _, sing, vt = np.linalg.svd(a)
    if sing[2] <= RANK_TOL * sing[0]:
        raise NonUniqueStationary(
            "the chain has multiple closed classes; no unique stationary vector"
        )
    v = vt[3]
    total = v.sum()
    if total < 0:
        v = -v
        total = -total
    if total <= RANK_TOL:
        raise NonUniqueStationary("stationary direction has numerically zero mass")
    v = v / total
    if np.any(v < -1e-12):
        raise NonUniqueStationary(
            f"stationary solve produced significantly negative mass: {v}"
        )
    v = np.clip(v, 0.0, None)
    v = v / v.sum()
    return StationaryResult(v=v, method=SolveMethod.LINEAR_SOLVE, unique=True)


def _determinant_columns(px: DecayedStrategy, qy: DecayedStrategy) -> np.ndarray:
    """First three columns of the payoff determinant, shape (4, 3).

    Column 0 is the joint-cooperation transition column minus the CC
    indicator; columns 1 and 2 are the players' tilted vectors. All three
    lie in the column space of P - I, which makes the determinant ratio
    equal the stationary average.
    """
    xc = px.state_cooperation
    yc = qy.state_cooperation
    cols = np.empty((4, 3))
    cols[:, 0] = xc * yc
    cols[0, 0] -= 1.0
    cols[:, 1] = px.tilted
    cols[:, 2] = qy.tilted
    return cols


def payoff_determinant(px: DecayedStrategy, qy: DecayedStrategy, f) -> float:
    """The 4x4 determinant D(p, q, f) whose ratio gives stationary averages.

    For any f, D(p, q, f) / D(p, q, 1) equals v . f whenever the chain has a
    unique stationary vector v; a zero-determinant choice of the fourth
    column is what lets one player pin a linear payoff relation.
    """
    if px.role is not Role.X or qy.role is not Role.Y:
        raise DomainError(
            f"payoff_determinant needs roles (X, Y), got ({px.role.value}, {qy.role.value})"
        )
    f = np.asarray(f, dtype=float)
    if f.shape != (4,):
        raise DomainError(f"f must be a 4-vector, got shape {f.shape}")
    mat = np.empty((4, 4))
    mat[:, :3] = _determinant_columns(px, qy)
    mat[:, 3] = f
    return float(np.linalg.det(mat))


def analytic_payoffs(
    px: DecayedStrategy, qy: DecayedStrategy, payoffs: GamePayoffs
) -> tuple[float, float, SolveMethod]:
    """Long-run payoffs (s_X, s_Y) plus the route that produced them.

    Uses the determinant ratio when well conditioned, otherwise the
    stationary linear solve. Raises DegenerateGame when the chain has
    multiple closed classes and no unique long-run payoff exists.
    """
    cols = _determinant_columns(px, qy)
    mat = np.empty((4, 4))
    mat[:, :3] = cols
    mat[:, 3] = 1.0
    d_one = float(np.linalg.det(mat))
    if abs(d_one) > DET_SWITCH:
        mat[:, 3] = payoffs.s_x
        d_x = float(np.linalg.det(mat))
        mat[:, 3] = payoffs.s_y
        d_y = float(np.linalg.det(mat))
        return d_x / d_one, d_y / d_one, SolveMethod.DETERMINANT
    try:
        res = stationary(transition_matrix(px, qy))
    except NonUniqueStationary as exc:
        raise DegenerateGame(
            "no unique long-run payoff: the chain has multiple closed classes"
        ) from exc
    return float(res.v @ payoffs.s_x), float(res.v @ payoffs.s_y), SolveMethod.LINEAR_SOLVE


def expected_payoffs(
    px: DecayedStrategy, qy: DecayedStrategy, payoffs: GamePayoffs
) -> tuple[float, float]:
    """Long-run payoffs (s_X, s_Y) in the stationary state.

    Raises DegenerateGame for reducible chains; callers that need a number
    anyway should fall back to ``simulate_match``.
    """
    s_x, s_y, _ = analytic_payoffs(px, qy, payoffs)
    return s_x, s_y


@njit(cache=True)
def _walk(xc, yc, u, state):  # pragma: no cover - exercised via wrappers
    counts = np.zeros(4, np.int64)
    for t in range(u.shape[0]):
        x_coop = u[t, 0] < xc[state]
        y_coop = u[t, 1] < yc[state]
        state = (0 if x_coop else 2) + (0 if y_coop else 1)
        counts[state] += 1
    return counts, state


def _mask_seed(seed: int) -> int:
    return int(seed) & 0xFFFFFFFFFFFFFFFF


def simulate_match(
    px: DecayedStrategy,
    qy: DecayedStrategy,
    payoffs: GamePayoffs,
    rounds: int,
    seed: int,
    *,
    initial_state: Outcome = Outcome.CC,
    burn_in: int = 0,
) -> tuple[float, float, np.ndarray]:
    """Play the memory-one game and return time-average payoffs.

    The initial joint outcome (default CC, both cooperate) seeds the first
    round's conditioning and is not itself counted. ``rounds`` outcomes are
    then generated; the first ``burn_in`` of them are discarded before
    averaging. Identical (seed, inputs) produce identical outputs.

    Returns (s_X, s_Y, state_counts) where state_counts holds the counted
    visits per state CC, CD, DC, DD.
    """
    rounds = int(rounds)
    if rounds < 1:
        raise DomainError(f"rounds must be >= 1, got {rounds}")
    burn_in = int(burn_in)
    if not (0 <= burn_in < rounds):
        raise DomainError(f"burn_in must be in [0, rounds), got {burn_in}")
    if px.role is not Role.X or qy.role is not Role.Y:
        raise DomainError("simulate_match needs roles (X, Y)")
    if px.m != qy.m:
        raise DomainError("both players must share one decay factor")
    rng = np.random.default_rng(_mask_seed(seed))
    u = rng.random((rounds, 2))
    xc = px.state_cooperation
    yc = qy.state_cooperation
    state = int(initial_state)
    if burn_in:
        _, state = _walk(xc, yc, u[:burn_in], state)
    counts, _ = _walk(xc, yc, u[burn_in:], state)
    n = rounds - burn_in
    s_x = float(counts @ payoffs.s_x) / n
    s_y = float(counts @ payoffs.s_y) / n
    return s_x, s_y, counts


def simulate_batch_counts(
    px: DecayedStrategy,
    qy: DecayedStrategy,
    rounds: int,
    seed: int,
    n_batches: int,
    *,
    initial_state: Outcome = Outcome.CC,
) -> np.ndarray:
    """State visit counts split into consecutive batches, shape (n_batches, 4).

    Consumes the same random stream as ``simulate_match`` with the same seed,
    so the batch counts sum to that match's state_counts. Batch means feed
    standard-error estimates that respect the chain's autocorrelation.
    """
    rounds = int(rounds)
    n_batches = int(n_batches)
    if n_batches < 1 or rounds < n_batches:
        raise DomainError(f"need 1 <= n_batches <= rounds, got {n_batches}, {rounds}")
    rng = np.random.default_rng(_mask_seed(seed))
    u = rng.random((rounds, 2))
    xc = px.state_cooperation
    yc = qy.state_cooperation
    state = int(initial_state)
    edges = np.linspace(0, rounds, n_batches + 1).astype(np.int64)
    out = np.empty((n_batches, 4), dtype=np.int64)
    for b in range(n_batches):
        counts, state = _walk(xc, yc, u[edges[b] : edges[b + 1]], state)
        out[b] = counts
    return out
