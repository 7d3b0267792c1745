"""Zero-determinant strategy constructors.

A memory-one strategy for X whose tilted vector (p1-1, p2-1, m*p3, m*p4) is a
linear combination alpha*S_X + beta*S_Y + gamma*1 of the payoff vectors makes
the payoff determinant vanish, forcing the long-run relation

    alpha * s_X + beta * s_Y + gamma = 0

regardless of the opponent's play. Three constructors are provided:

* ``linear_strategy``: the general combination, parameterized by
  (alpha, beta, gamma, phi, m) over donation payoffs,
* ``equalizer_strategy`` / ``equalizer_from_payoffs``: alpha = 0, which pins
  the opponent's payoff to a constant,
* ``extortion_strategy``: the relation s_Y - P = s * (s_X - P) with s < 1,
  which keeps the opponent's surplus a fixed fraction of one's own.

Constructors never clamp: an out-of-box component raises InfeasibleStrategy
naming the component, because clamping would destroy the determinant
identity the strategy exists to enforce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DegenerateEqualizer,
    DomainError,
    InfeasibleStrategy,
    SingularSystem,
)
from .game import DonationParams, GamePayoffs, MemoryOneStrategy, payoffs_from_donation

__all__ = [
    "ZDParams",
    "ZDStrategy",
    "StrategyKind",
    "linear_strategy",
    "equalizer_strategy",
    "equalizer_from_payoffs",
    "extortion_strategy",
    "phi_range",
    "s_range",
]

#: |1 - p1 + p4| at or below this counts as a degenerate equalizer.
EQUALIZER_EPS = 1e-12


class StrategyKind(Enum):
    LINEAR_GENERAL = "linear_general"
    EQUALIZER = "equalizer"
    EXTORTION = "extortion"


@dataclass(frozen=True)
class ZDParams:
    """Coefficients tying a strategy to its enforced payoff relation.

    The relation is alpha * s_X + beta * s_Y + gamma = 0. phi scales the
    tilted vector, s is the extortion factor (None otherwise), and
    reference_point is the payoff the extortion relation passes through
    (always P; None for other kinds). m is the decay factor the strategy
    was built for.
    """

    alpha: float
    beta: float
    gamma: float
    phi: float
    m: float = 1.0
    s: float | None = None
    reference_point: float | None = None


@dataclass(frozen=True)
class ZDStrategy:
    """A constructed zero-determinant strategy with its control prediction.

    ``predicted`` is the pinned opponent payoff for an equalizer and the
    surplus slope s for an extortion strategy; None for the general linear
    kind. The strategy vector is pre-decay: apply ``decay`` with params.m
    before building transition matrices when m < 1.
    """

    strategy: MemoryOneStrategy
    params: ZDParams
    kind: StrategyKind
    predicted: float | None = None


def _require_feasible(components: dict[str, float], detail: str = "") -> None:
    for name, value in components.items():
        if math.isnan(value) or value < 0.0 or value > 1.0:
            raise InfeasibleStrategy(name, value, detail)


def _check_m(m: float) -> float:
    m = float(m)
    if not (0.0 < m <= 1.0) or math.isnan(m):
        raise DomainError(f"decay factor m = {m!r} must be in (0, 1]")
    return m


def linear_strategy(params: ZDParams, donation: DonationParams) -> ZDStrategy:
    """Strategy enforcing alpha * s_X + beta * s_Y + gamma = 0 over donation payoffs.

    The tilted vector is phi * (alpha*S_X + beta*S_Y + gamma*1); the decayed
    components carry a 1/m so that the damped strategy realizes the relation
    at any m in (0, 1].
    """
    m = _check_m(params.m)
    phi = float(params.phi)
    if not (phi > 0.0) or math.isnan(phi):
        raise DomainError(f"phi = {params.phi!r} must be positive")
    payoffs = payoffs_from_donation(donation)
    tilt = phi * (
        params.alpha * payoffs.s_x + params.beta * payoffs.s_y + params.gamma * np.ones(4)
    )
    p1 = 1.0 + tilt[0]
    p2 = 1.0 + tilt[1]
    p3 = tilt[2] / m
    p4 = tilt[3] / m
    _require_feasible(
        {"p1": p1, "p2": p2, "p3": p3, "p4": p4},
        detail=(
            f"the relation {params.alpha:g}*s_x + {params.beta:g}*s_y + "
            f"{params.gamma:g} = 0 is not enforceable at phi={phi:g}, m={m:g}"
        ),
    )
    return ZDStrategy(
        strategy=MemoryOneStrategy(p1, p2, p3, p4),
        params=params,
        kind=StrategyKind.LINEAR_GENERAL,
        predicted=None,
    )


def equalizer_strategy(
    p1: float, p4: float, donation: DonationParams, m: float = 1.0
) -> ZDStrategy:
    """Equalizer over donation payoffs: pins the opponent's long-run payoff.

    Given the two free corners p1 and p4, the remaining components are

        p2 = (r*p1 - c*(1 + p4)) / (r - c)
        p3 = ((2c - r)*(1 - p1) + c*p4) / (r - c)

    and the opponent is held at p4*(r - c) / (2*(1 - p1 + p4)) no matter how
    it plays. The returned vector is pre-decay; the prediction is exact at
    m = 1.
    """
    m = _check_m(m)
    p1 = float(p1)
    p4 = float(p4)
    if not (0.0 <= p1 <= 1.0 and 0.0 <= p4 <= 1.0):
        raise DomainError(f"p1 and p4 must be probabilities, got {p1}, {p4}")
    r, c = donation.r, donation.c
    denom = 1.0 - p1 + p4
    if denom <= EQUALIZER_EPS:
        raise DegenerateEqualizer(
            f"1 - p1 + p4 = {denom:.3g} leaves the opponent's payoff undefined"
        )
    p2 = (r * p1 - c * (1.0 + p4)) / (r - c)
    p3 = ((2.0 * c - r) * (1.0 - p1) + c * p4) / (r - c)
    _require_feasible(
        {"p2": p2, "p3": p3},
        detail=f"no equalizer exists at p1={p1:g}, p4={p4:g} for r={r:g}, c={c:g}",
    )
    predicted = p4 * (r - c) / (2.0 * denom)
    beta = -2.0 * denom / (r - c)
    params = ZDParams(alpha=0.0, beta=beta, gamma=p4, phi=1.0, m=m)
    return ZDStrategy(
        strategy=MemoryOneStrategy(p1, p2, p3, p4),
        params=params,
        kind=StrategyKind.EQUALIZER,
        predicted=predicted,
    )


def equalizer_from_payoffs(p1: float, p4: float, payoffs: GamePayoffs) -> ZDStrategy:
    """Equalizer for arbitrary (R, S, T, P) payoffs, solved from its defining relation.

    Imposes (p1-1, p2-1, p3, p4) = beta*S_Y + gamma*1. Components 1 and 4
    determine (beta, gamma); components 2 and 3 follow. The opponent is held
    at -gamma/beta. Agrees with ``equalizer_strategy`` whenever the payoffs
    come from a donation parameterization.
    """
    p1 = float(p1)
    p4 = float(p4)
    if not (0.0 <= p1 <= 1.0 and 0.0 <= p4 <= 1.0):
        raise DomainError(f"p1 and p4 must be probabilities, got {p1}, {p4}")
    R, S, T, P = payoffs.R, payoffs.S, payoffs.T, payoffs.P
    if abs(R - P) <= EQUALIZER_EPS:
        raise SingularSystem(
            f"R = P = {R:g} makes the corner system singular; no equalizer solve"
        )
    beta = (p1 - 1.0 - p4) / (R - P)
    gamma = p4 - beta * P
    if abs(beta) <= EQUALIZER_EPS:
        raise DegenerateEqualizer(
            f"beta = {beta:.3g} gives no control over the opponent's payoff"
        )
    p2 = 1.0 + beta * T + gamma
    p3 = beta * S + gamma
    _require_feasible(
        {"p2": p2, "p3": p3},
        detail=f"no equalizer exists at p1={p1:g}, p4={p4:g} for payoffs "
        f"(R={R:g}, S={S:g}, T={T:g}, P={P:g})",
    )
    predicted = -gamma / beta
    params = ZDParams(alpha=0.0, beta=beta, gamma=gamma, phi=1.0, m=1.0)
    return ZDStrategy(
        strategy=MemoryOneStrategy(p1, p2, p3, p4),
        params=params,
        kind=StrategyKind.EQUALIZER,
        predicted=predicted,
    )


def s_range(donation: DonationParams) -> tuple[float, float]:
    """Valid extortion factors: [(r - 2c)/r, 1), lower bound inclusive."""
    return ((donation.r - 2.0 * donation.c) / donation.r, 1.0)


def phi_range(s: float, donation: DonationParams) -> tuple[float, float]:
    """Open-bottom range (0, hi] of feasible phi for an extortion factor s.

    hi = 1 / (s*(c - r/2) + r/2), the tightest of the box constraints on the
    extortion components; at phi = hi the second component sits exactly at 0.
    Raises DomainError if the denominator is not positive.
    """
    s = float(s)
    r, c = donation.r, donation.c
    denom = s * (c - r / 2.0) + r / 2.0
    if denom <= 0.0 or math.isnan(denom):
        raise DomainError(
            f"s = {s:g} makes s*(c - r/2) + r/2 = {denom:g} nonpositive; no feasible phi"
        )
    return (0.0, 1.0 / denom)


def extortion_strategy(s: float, phi: float, donation: DonationParams) -> ZDStrategy:
    """Extortion over donation payoffs: s_Y - P = s * (s_X - P) with s < 1.

    Components:

        p1 = 1 - phi*(1 - s)*(r - c)/2
        p2 = 1 - phi*(s*(c - r/2) + r/2)
        p3 = phi*((c - r/2) + s*r/2)
        p4 = 0

    Whenever the opponent earns above P, it earns strictly less than X does.
    Raises DomainError for s outside [(r - 2c)/r, 1) and InfeasibleStrategy
    for phi above the feasible upper bound.
    """
    s = float(s)
    phi = float(phi)
    r, c = donation.r, donation.c
    lo, hi = s_range(donation)
    if not (lo <= s < hi) or math.isnan(s):
        raise DomainError(
            f"extortion factor s = {s:g} outside the valid range [{lo:g}, 1)"
        )
    if not (phi > 0.0) or math.isnan(phi):
        raise DomainError(f"phi = {phi!r} must be positive")
    phi_hi = phi_range(s, donation)[1]
    p2 = 1.0 - phi * (s * (c - r / 2.0) + r / 2.0)
    if phi > phi_hi:
        raise InfeasibleStrategy(
            "p2",
            p2,
            detail=(
                f"phi = {phi:g} exceeds the upper bound {phi_hi:.6g} "
                f"= 1/(s*(c - r/2) + r/2)"
            ),
        )
    p1 = 1.0 - phi * (1.0 - s) * (r - c) / 2.0
    p3 = phi * ((c - r / 2.0) + s * r / 2.0)
    p4 = 0.0
    _require_feasible(
        {"p1": p1, "p2": p2, "p3": p3},
        detail=f"extortion at s={s:g}, phi={phi:g} for r={r:g}, c={c:g}",
    )
    params = ZDParams(
        alpha=phi * s,
        beta=-phi,
        gamma=0.0,
        phi=phi,
        m=1.0,
        s=s,
        reference_point=0.0,
    )
    return ZDStrategy(
        strategy=MemoryOneStrategy(p1, p2, p3, p4),
        params=params,
        kind=StrategyKind.EXTORTION,
        predicted=s,
    )
