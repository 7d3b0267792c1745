"""Experiment run configuration: JSON files mirroring the CLI flags.

Unknown keys are rejected so config typos fail loudly. CLI flags always
override file values.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .errors import ConfigError

__all__ = ["RunConfig", "load_config"]

_MODES = ("analytic", "simulated")
_STRATEGY_NAMES = ("wsls", "allc", "alld", "tft", "zd-set", "zd-extortion", "linear")


@dataclass
class RunConfig:
    """Every field optional; validation enforces the cross-field invariants.

    Strategy source is exactly one of: a named ``strategy`` (ZD names pull
    their parameters from the parameter fields) or an explicit ``p`` vector.
    Payoffs come from at most one of ``rstp`` (R, S, T, P) or ``rc``
    (donation r, c).
    """

    figure: int | None = None
    strategy: str | None = None
    p: tuple[float, float, float, float] | None = None
    p1: float | None = None
    p4: float | None = None
    s: float | None = None
    phi: float | None = None
    alpha: float | None = None
    beta: float | None = None
    gamma: float | None = None
    rstp: tuple[float, float, float, float] | None = None
    rc: tuple[float, float] | None = None
    m: float | None = None
    n: int | None = None
    mode: str | None = None
    rounds: int | None = None
    seed: int | None = None
    out: str | None = None
    workers: int | None = None

    def validate(self) -> "RunConfig":
        if self.strategy is not None and self.p is not None:
            raise ConfigError(
                "conflicting strategy sources: both 'strategy' and 'p' given; use exactly one"
            )
        if self.strategy is not None and self.strategy not in _STRATEGY_NAMES:
            raise ConfigError(
                f"unknown strategy {self.strategy!r}; known: {', '.join(_STRATEGY_NAMES)}"
            )
        if self.p is not None and len(self.p) != 4:
            raise ConfigError(f"'p' must have 4 components, got {len(self.p)}")
        if self.rstp is not None and self.rc is not None:
            raise ConfigError(
                "conflicting payoff sources: both 'rstp' and 'rc' blocks given; use exactly one"
            )
        if self.rstp is not None and len(self.rstp) != 4:
            raise ConfigError(f"'rstp' must have 4 components, got {len(self.rstp)}")
        if self.rc is not None and len(self.rc) != 2:
            raise ConfigError(f"'rc' must have 2 components, got {len(self.rc)}")
        if self.m is not None and not (0.0 < self.m <= 1.0):
            raise ConfigError(f"m must be in (0, 1], got {self.m}")
        if self.mode is not None and self.mode not in _MODES:
            raise ConfigError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if self.figure is not None and self.figure not in (2, 3, 4, 5):
            raise ConfigError(f"figure must be one of 2, 3, 4, 5, got {self.figure}")
        for name in ("n", "rounds", "workers"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ConfigError(f"{name} must be >= 1, got {value}")
        return self

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        kwargs = dict(data)
        for key in ("p", "rstp", "rc"):
            if kwargs.get(key) is not None:
                try:
                    kwargs[key] = tuple(float(v) for v in kwargs[key])
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"'{key}' must be a list of numbers") from exc
        return cls(**kwargs).validate()

    def to_dict(self) -> dict:
        out = {}
        for key, value in asdict(self).items():
            if value is None:
                continue
            out[key] = list(value) if isinstance(value, tuple) else value
        return out


def load_config(path: str | Path) -> RunConfig:
    """Parse a JSON run configuration; strict about keys and values."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object, got {type(data).__name__}")
    return RunConfig.from_dict(data)
