"""Memory-one iterated prisoner's dilemma with zero-determinant strategies.

Game algebra (transition matrices, stationary payoffs, determinant payoffs),
equalizer and extortion strategy constructors with feasibility checking, and
reproducible payoff-cloud experiments against random opponents.
"""

from .arena import (
    CloudDiagnostics,
    ExperimentSpec,
    FigureResult,
    PayoffCloud,
    analyze_cloud,
    derive_seed,
    reproduce_figure,
    run_cloud,
)
from .config import RunConfig, load_config
from .errors import (
    ConfigError,
    DegenerateCloud,
    DegenerateEqualizer,
    DegenerateGame,
    DomainError,
    InfeasibleStrategy,
    NonUniqueStationary,
    SingularSystem,
    ZDGameError,
)
from .game import (
    Action,
    DecayedStrategy,
    DonationParams,
    GamePayoffs,
    MemoryOneStrategy,
    Outcome,
    Role,
    SolveMethod,
    StationaryResult,
    TransitionMatrix,
    analytic_payoffs,
    decay,
    expected_payoffs,
    make_payoffs,
    payoff_determinant,
    payoffs_from_donation,
    simulate_batch_counts,
    simulate_match,
    stationary,
    transition_matrix,
)
from .strategies import (
    NamedStrategy,
    allc,
    alld,
    named_strategy,
    random_strategy,
    strategy_names,
    tft,
    wsls,
)
from .zd import (
    StrategyKind,
    ZDParams,
    ZDStrategy,
    equalizer_from_payoffs,
    equalizer_strategy,
    extortion_strategy,
    linear_strategy,
    phi_range,
    s_range,
)

__version__ = "0.1.0"

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
    "ZDParams",
    "ZDStrategy",
    "StrategyKind",
    "linear_strategy",
    "equalizer_strategy",
    "equalizer_from_payoffs",
    "extortion_strategy",
    "phi_range",
    "s_range",
    "NamedStrategy",
    "wsls",
    "allc",
    "alld",
    "tft",
    "named_strategy",
    "strategy_names",
    "random_strategy",
    "ExperimentSpec",
    "PayoffCloud",
    "CloudDiagnostics",
    "FigureResult",
    "run_cloud",
    "analyze_cloud",
    "reproduce_figure",
    "derive_seed",
    "RunConfig",
    "load_config",
    "ZDGameError",
    "DomainError",
    "NonUniqueStationary",
    "DegenerateGame",
    "InfeasibleStrategy",
    "DegenerateEqualizer",
    "SingularSystem",
    "DegenerateCloud",
    "ConfigError",
]
