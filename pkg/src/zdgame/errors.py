"""Exception hierarchy shared by all zdgame modules."""

from __future__ import annotations


class ZDGameError(Exception):
    """Base class for all domain errors raised by this package."""


class DomainError(ZDGameError):
    """A parameter falls outside its mathematical domain."""


class NonUniqueStationary(ZDGameError):
    """The Markov chain has multiple closed classes and no unique stationary vector."""


class DegenerateGame(ZDGameError):
    """No unique long-run payoff exists for this strategy pair (reducible chain)."""


class InfeasibleStrategy(ZDGameError):
    """A constructed strategy has a component outside [0, 1].

    Carries the offending component name, its value, and the amount by which
    the [0, 1] box is violated, so callers can report the exact failure.
    """

    def __init__(self, component: str, value: float, detail: str = ""):
        self.component = component
        self.value = value
        overshoot = value - 1.0 if value > 1.0 else -value
        msg = f"{component} = {value:.6g} falls outside [0, 1] by {overshoot:.6g}"
        if detail:
            msg += f"; {detail}"
        super().__init__(msg)


class DegenerateEqualizer(ZDGameError):
    """The equalizer construction degenerates (no opponent-payoff control)."""


class SingularSystem(ZDGameError):
    """The linear system defining the strategy has no unique solution."""


class DegenerateCloud(ZDGameError):
    """Too few points to analyze a payoff cloud."""


class ConfigError(ZDGameError):
    """A run configuration file or flag combination is invalid."""
