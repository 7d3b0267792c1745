"""Reference memory-one strategies and the random-opponent sampler."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .game import MemoryOneStrategy

__all__ = [
    "NamedStrategy",
    "wsls",
    "allc",
    "alld",
    "tft",
    "named_strategy",
    "strategy_names",
    "random_strategy",
]


@dataclass(frozen=True)
class NamedStrategy:
    name: str
    strategy: MemoryOneStrategy


def wsls() -> NamedStrategy:
    """Win-stay lose-shift, p = (1, 0, 0, 1).

    "Win" means receiving R or T (states CC and DC from one's own
    perspective): repeat the previous move after a win, switch after S or P.
    """
    return NamedStrategy("wsls", MemoryOneStrategy(1.0, 0.0, 0.0, 1.0))


def allc() -> NamedStrategy:
    """Unconditional cooperation, p = (1, 1, 1, 1)."""
    return NamedStrategy("allc", MemoryOneStrategy(1.0, 1.0, 1.0, 1.0))


def alld() -> NamedStrategy:
    """Unconditional defection, p = (0, 0, 0, 0)."""
    return NamedStrategy("alld", MemoryOneStrategy(0.0, 0.0, 0.0, 0.0))


def tft() -> NamedStrategy:
    """Tit-for-tat, p = (1, 0, 1, 0). Included for completeness; not used by
    any bundled experiment preset."""
    return NamedStrategy("tft", MemoryOneStrategy(1.0, 0.0, 1.0, 0.0))


_REGISTRY = {
    "wsls": wsls,
    "allc": allc,
    "alld": alld,
    "tft": tft,
}


def strategy_names() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


def named_strategy(name: str) -> NamedStrategy:
    """Look up a reference strategy by name; raises DomainError for unknown names."""
    key = name.strip().lower()
    if key not in _REGISTRY:
        raise DomainError(
            f"unknown strategy {name!r}; known names: {', '.join(strategy_names())}"
        )
    return _REGISTRY[key]()


def random_strategy(rng: np.random.Generator) -> MemoryOneStrategy:
    """Four cooperation probabilities drawn independently and uniformly from [0, 1]."""
    return MemoryOneStrategy.from_vector(rng.random(4))
