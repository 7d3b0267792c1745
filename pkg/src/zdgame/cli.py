"""Command-line interface.

Subcommands: payoff, stationary, zd (set | extort | linear), cloud, figure.
Exit codes: 0 success, 1 infeasible or degenerate construction reported,
2 bad arguments or configuration. Human-readable numbers use 4 decimals;
CSV output keeps full double precision.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .arena import ExperimentSpec, FIGURE_IDS, reproduce_figure, run_cloud
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
)
from .game import (
    DonationParams,
    GamePayoffs,
    MemoryOneStrategy,
    Role,
    SolveMethod,
    decay,
    make_payoffs,
    payoffs_from_donation,
    analytic_payoffs,
    simulate_match,
    stationary,
    transition_matrix,
)
from .output import write_cloud_csv, write_scatter_svg
from .strategies import named_strategy, strategy_names
from .zd import (
    equalizer_from_payoffs,
    equalizer_strategy,
    extortion_strategy,
    linear_strategy,
    phi_range,
    s_range,
    ZDParams,
)

OUT_DIR_ENV = "ZDGAME_OUT_DIR"

_REPORTED = (
    InfeasibleStrategy,
    DegenerateEqualizer,
    SingularSystem,
    NonUniqueStationary,
    DegenerateGame,
    DegenerateCloud,
)
_BAD_ARGS = (ConfigError, DomainError)


def _fmt4(x: float) -> str:
    return f"{x:.4f}"


def _vec(strategy: MemoryOneStrategy) -> str:
    return "(" + ", ".join(_fmt4(v) for v in strategy.as_array()) + ")"


def _add_payoff_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--R", type=float, default=None, help="mutual cooperation payoff")
    parser.add_argument("--S", type=float, default=None, help="sucker payoff")
    parser.add_argument("--T", type=float, default=None, help="temptation payoff")
    parser.add_argument("--P", type=float, default=None, help="mutual defection payoff")
    parser.add_argument("--r", type=float, default=None, help="donation benefit")
    parser.add_argument("--c", type=float, default=None, help="donation cost")


def _resolve_payoffs(args, default=(1.5, -1.0, 3.0, 0.0)) -> tuple[GamePayoffs, DonationParams | None]:
    rstp = [getattr(args, k, None) for k in ("R", "S", "T", "P")]
    rc = [getattr(args, k, None) for k in ("r", "c")]
    has_rstp = any(v is not None for v in rstp)
    has_rc = any(v is not None for v in rc)
    if has_rstp and has_rc:
        raise ConfigError(
            "conflicting payoff sources: give either --R/--S/--T/--P or --r/--c, not both"
        )
    if has_rc:
        if rc[0] is None or rc[1] is None:
            raise ConfigError("donation payoffs need both --r and --c")
        donation = DonationParams(rc[0], rc[1])
        return payoffs_from_donation(donation), donation
    if has_rstp:
        if any(v is None for v in rstp):
            raise ConfigError("payoffs need all four of --R, --S, --T, --P")
        return make_payoffs(*rstp), None
    return make_payoffs(*default), None


def _parse_strategy_arg(text: str) -> MemoryOneStrategy | str:
    """A strategy flag is a registry name, a ZD constructor name, or 4 floats."""
    if "," in text:
        parts = text.split(",")
        if len(parts) != 4:
            raise ConfigError(f"a strategy vector needs 4 components, got {len(parts)}")
        try:
            return MemoryOneStrategy.from_vector([float(v) for v in parts])
        except ValueError as exc:
            raise ConfigError(f"cannot parse strategy vector {text!r}") from exc
    return text.strip().lower()


def _resolve_fixed_strategy(text: str) -> MemoryOneStrategy:
    parsed = _parse_strategy_arg(text)
    if isinstance(parsed, MemoryOneStrategy):
        return parsed
    return named_strategy(parsed).strategy


def _build_zd_strategy(name: str, args, payoffs: GamePayoffs, donation: DonationParams | None):
    if name == "zd-set":
        if args.p1 is None or args.p4 is None:
            raise ConfigError("zd-set needs --p1 and --p4")
        if donation is not None:
            return equalizer_strategy(args.p1, args.p4, donation, m=args.m)
        return equalizer_from_payoffs(args.p1, args.p4, payoffs)
    if name == "zd-extortion":
        if args.s is None or args.phi is None:
            raise ConfigError("zd-extortion needs --s and --phi")
        if donation is None:
            raise ConfigError("zd-extortion needs donation payoffs: give --r and --c")
        return extortion_strategy(args.s, args.phi, donation)
    if name == "linear":
        missing = [k for k in ("alpha", "beta", "gamma", "phi") if getattr(args, k) is None]
        if missing:
            raise ConfigError(f"linear needs --{', --'.join(missing)}")
        if donation is None:
            raise ConfigError("linear needs donation payoffs: give --r and --c")
        params = ZDParams(
            alpha=args.alpha, beta=args.beta, gamma=args.gamma, phi=args.phi, m=args.m
        )
        return linear_strategy(params, donation)
    raise ConfigError(f"unknown strategy {name!r}")


def _resolve_x_strategy(args, payoffs: GamePayoffs, donation: DonationParams | None):
    """Returns (label, object-for-spec). ZD names build full ZDStrategy objects."""
    parsed = _parse_strategy_arg(args.x)
    if isinstance(parsed, MemoryOneStrategy):
        return "custom", parsed
    if parsed in strategy_names():
        named = named_strategy(parsed)
        return named.name, named
    zd = _build_zd_strategy(parsed, args, payoffs, donation)
    return parsed, zd


def _out_dir(args) -> str:
    if getattr(args, "out", None):
        return args.out
    return os.environ.get(OUT_DIR_ENV, ".")


def _apply_config(args) -> None:
    """Fill unset flags from --config; explicit flags win."""
    if not getattr(args, "config", None):
        return
    cfg = load_config(args.config)
    mapping = {
        "figure": "id",
        "strategy": "x",
        "n": "n",
        "mode": "mode",
        "rounds": "rounds",
        "seed": "seed",
        "out": "out",
        "workers": "workers",
        "m": "m",
        "p1": "p1",
        "p4": "p4",
        "s": "s",
        "phi": "phi",
        "alpha": "alpha",
        "beta": "beta",
        "gamma": "gamma",
    }
    for cfg_key, arg_key in mapping.items():
        value = getattr(cfg, cfg_key, None)
        if value is None or not hasattr(args, arg_key):
            continue
        if getattr(args, arg_key) is None:
            setattr(args, arg_key, value)
    if cfg.p is not None and hasattr(args, "x") and args.x is None:
        args.x = ",".join(str(v) for v in cfg.p)
    if cfg.rstp is not None:
        for key, value in zip(("R", "S", "T", "P"), cfg.rstp):
            if hasattr(args, key) and getattr(args, key) is None:
                setattr(args, key, value)
    if cfg.rc is not None:
        for key, value in zip(("r", "c"), cfg.rc):
            if hasattr(args, key) and getattr(args, key) is None:
                setattr(args, key, value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zdgame",
        description="Memory-one iterated prisoner's dilemma with zero-determinant strategies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_payoff = sub.add_parser("payoff", help="long-run payoffs for a strategy pair")
    p_payoff.add_argument("--x", required=True, help="row strategy: name or 4 floats")
    p_payoff.add_argument("--y", required=True, help="column strategy: name or 4 floats")
    p_payoff.add_argument("--m", type=float, default=1.0, help="decay factor in (0, 1]")
    p_payoff.add_argument("--rounds", type=int, default=100_000)
    p_payoff.add_argument("--seed", type=int, default=0)
    _add_payoff_flags(p_payoff)

    p_stat = sub.add_parser("stationary", help="transition matrix and stationary vector")
    p_stat.add_argument("--x", required=True)
    p_stat.add_argument("--y", required=True)
    p_stat.add_argument("--m", type=float, default=1.0)

    p_zd = sub.add_parser("zd", help="construct a zero-determinant strategy")
    zd_sub = p_zd.add_subparsers(dest="zd_command", required=True)
    p_set = zd_sub.add_parser("set", help="equalizer: pin the opponent's payoff")
    p_set.add_argument("--p1", type=float, required=True)
    p_set.add_argument("--p4", type=float, required=True)
    p_set.add_argument("--m", type=float, default=1.0)
    _add_payoff_flags(p_set)
    p_ext = zd_sub.add_parser("extort", help="extortion: opponent surplus = s * own surplus")
    p_ext.add_argument("--s", type=float, required=True, help="extortion factor, s < 1")
    p_ext.add_argument("--phi", type=float, required=True)
    p_ext.add_argument("--r", type=float, required=True)
    p_ext.add_argument("--c", type=float, required=True)
    p_lin = zd_sub.add_parser("linear", help="general linear payoff relation")
    p_lin.add_argument("--alpha", type=float, required=True)
    p_lin.add_argument("--beta", type=float, required=True)
    p_lin.add_argument("--gamma", type=float, required=True)
    p_lin.add_argument("--phi", type=float, required=True)
    p_lin.add_argument("--r", type=float, required=True)
    p_lin.add_argument("--c", type=float, required=True)
    p_lin.add_argument("--m", type=float, default=1.0)

    p_cloud = sub.add_parser("cloud", help="one strategy vs n random opponents")
    p_cloud.add_argument("--x", default=None, help="name, ZD constructor, or 4 floats")
    p_cloud.add_argument("--n", type=int, default=None)
    p_cloud.add_argument("--seed", type=int, default=None)
    p_cloud.add_argument("--m", type=float, default=None)
    p_cloud.add_argument("--mode", choices=("analytic", "simulated"), default=None)
    p_cloud.add_argument("--rounds", type=int, default=None)
    p_cloud.add_argument("--workers", type=int, default=None)
    p_cloud.add_argument("--out", default=None)
    p_cloud.add_argument("--config", default=None, help="JSON run configuration")
    p_cloud.add_argument("--p1", type=float, default=None)
    p_cloud.add_argument("--p4", type=float, default=None)
    p_cloud.add_argument("--s", type=float, default=None)
    p_cloud.add_argument("--phi", type=float, default=None)
    p_cloud.add_argument("--alpha", type=float, default=None)
    p_cloud.add_argument("--beta", type=float, default=None)
    p_cloud.add_argument("--gamma", type=float, default=None)
    _add_payoff_flags(p_cloud)

    p_fig = sub.add_parser("figure", help="bundled experiment presets")
    p_fig.add_argument("--id", type=int, default=None, choices=FIGURE_IDS)
    p_fig.add_argument("--seed", type=int, default=None)
    p_fig.add_argument("--n", type=int, default=None)
    p_fig.add_argument("--workers", type=int, default=None)
    p_fig.add_argument("--out", default=None)
    p_fig.add_argument("--config", default=None, help="JSON run configuration")

    return parser


def cmd_payoff(args) -> int:
    payoffs, _ = _resolve_payoffs(args)
    x = _resolve_fixed_strategy(args.x)
    y = _resolve_fixed_strategy(args.y)
    px = decay(x, args.m, Role.X)
    qy = decay(y, args.m, Role.Y)
    print(f"x = {args.x} {_vec(x)}")
    print(f"y = {args.y} {_vec(y)}")
    print(
        f"payoffs: R={payoffs.R:g} S={payoffs.S:g} T={payoffs.T:g} P={payoffs.P:g}"
        f" (pd ordering: {'true' if payoffs.pd_valid else 'false'}), m={args.m:g}"
    )
    degenerate = False
    try:
        s_x, s_y, method = analytic_payoffs(px, qy, payoffs)
    except DegenerateGame:
        degenerate = True
        s_x, s_y, _ = simulate_match(
            px, qy, payoffs, rounds=args.rounds, seed=args.seed, burn_in=args.rounds // 10
        )
        method = SolveMethod.TIME_AVERAGE
    print(
        f"analytic: s_x = {_fmt4(s_x)}, s_y = {_fmt4(s_y)} "
        f"(method: {method.value}, degenerate: {'true' if degenerate else 'false'})"
    )
    sim_x, sim_y, _ = simulate_match(px, qy, payoffs, rounds=args.rounds, seed=args.seed)
    print(
        f"simulated: s_x = {_fmt4(sim_x)}, s_y = {_fmt4(sim_y)} "
        f"(rounds={args.rounds}, seed={args.seed})"
    )
    return 0


def cmd_stationary(args) -> int:
    x = _resolve_fixed_strategy(args.x)
    y = _resolve_fixed_strategy(args.y)
    matrix = transition_matrix(decay(x, args.m, Role.X), decay(y, args.m, Role.Y))
    print("transition matrix (rows and columns ordered CC, CD, DC, DD):")
    for row in matrix.rows:
        print("  [" + ", ".join(_fmt4(v) for v in row) + "]")
    result = stationary(matrix)
    print(f"stationary v = ({', '.join(_fmt4(v) for v in result.v)})")
    print(f"method: {result.method.value}, unique: {'true' if result.unique else 'false'}")
    return 0


def cmd_zd(args) -> int:
    if args.zd_command == "set":
        payoffs, donation = _resolve_payoffs(args)
        if donation is not None:
            zd = equalizer_strategy(args.p1, args.p4, donation, m=args.m)
        else:
            zd = equalizer_from_payoffs(args.p1, args.p4, payoffs)
        print(f"equalizer strategy p = {_vec(zd.strategy)}")
        print("feasible: true")
        print(f"pinned opponent payoff: {_fmt4(zd.predicted)}")
        print(
            f"relation: {zd.params.beta:.4g} * s_y + {zd.params.gamma:.4g} = 0"
        )
    elif args.zd_command == "extort":
        donation = DonationParams(args.r, args.c)
        zd = extortion_strategy(args.s, args.phi, donation)
        lo, hi = s_range(donation)
        plo, phi_hi = phi_range(args.s, donation)
        print(f"extortion strategy p = {_vec(zd.strategy)}")
        print("feasible: true")
        print(f"slope: s = {_fmt4(zd.params.s)} (opponent surplus = s * own surplus)")
        print(f"reference point: P = {_fmt4(zd.params.reference_point)}")
        print(f"valid s range: [{lo:.4f}, {hi:.4f}); valid phi range: ({plo:g}, {phi_hi:.4f}]")
    else:
        donation = DonationParams(args.r, args.c)
        params = ZDParams(
            alpha=args.alpha, beta=args.beta, gamma=args.gamma, phi=args.phi, m=args.m
        )
        zd = linear_strategy(params, donation)
        print(f"linear strategy p = {_vec(zd.strategy)}")
        print("feasible: true")
        print(
            f"relation: {args.alpha:g} * s_x + {args.beta:g} * s_y + {args.gamma:g} = 0"
        )
    return 0


def _print_diagnostics(label: str, cloud) -> None:
    d = cloud.diagnostics
    n_deg = int(cloud.degenerate.sum())
    print(
        f"cloud {label}: n={len(cloud)}, degenerate points: {n_deg}, "
        f"collinear: {'true' if d.collinear else 'false'}"
    )
    if d.line is not None:
        slope, intercept, residual = d.line
        print(
            f"  fit: s_y = {_fmt4(intercept)} + {_fmt4(slope)} * s_x "
            f"(max residual {residual:.3e})"
        )
    print(
        f"  hull_area: {_fmt4(d.hull_area)}, dominance_fraction: {_fmt4(d.dominance_fraction)}"
    )


def cmd_cloud(args) -> int:
    _apply_config(args)
    if args.x is None:
        raise ConfigError("cloud needs a strategy: --x or a config 'strategy'/'p' entry")
    args.m = 1.0 if args.m is None else args.m
    n = 1000 if args.n is None else args.n
    seed = 0 if args.seed is None else args.seed
    mode = args.mode or "analytic"
    workers = args.workers or 1
    payoffs, donation = _resolve_payoffs(args)
    label, x_obj = _resolve_x_strategy(args, payoffs, donation)
    spec = ExperimentSpec(
        x_strategy=x_obj,
        n_opponents=n,
        payoffs=payoffs,
        master_seed=seed,
        m=args.m,
        mode=mode,
        rounds=args.rounds,
    )
    cloud = run_cloud(spec, workers=workers)
    _print_diagnostics(label, cloud)
    out = _out_dir(args)
    os.makedirs(out, exist_ok=True)
    csv_path = write_cloud_csv(os.path.join(out, "cloud.csv"), cloud)
    svg_path = write_scatter_svg(
        os.path.join(out, "cloud.svg"), [(label, cloud.sx, cloud.sy)], title=f"{label} vs random"
    )
    print(f"wrote {csv_path}")
    print(f"wrote {svg_path}")
    return 0


def cmd_figure(args) -> int:
    _apply_config(args)
    if args.id is None:
        raise ConfigError("figure needs --id or a config 'figure' entry")
    seed = 0 if args.seed is None else args.seed
    n = 50_000 if args.n is None else args.n
    workers = args.workers or 1
    out = _out_dir(args)
    result = reproduce_figure(args.id, seed, out, n_opponents=n, workers=workers)
    print(f"figure {args.id}: seed={seed}, n={n}")
    for label, cloud in result.clouds:
        _print_diagnostics(label, cloud)
        if "predicted_sy" in result.info:
            deviation = float(np.abs(cloud.sy - result.info["predicted_sy"]).max())
            print(
                f"  opponent payoff pinned at {_fmt4(result.info['predicted_sy'])} "
                f"(max |s_y - predicted| = {deviation:.3e})"
            )
        if "slope" in result.info:
            s = result.info["slope"]
            ref = result.info["reference_point"]
            deviation = float(
                np.abs(s * (cloud.sx - ref) - (cloud.sy - ref)).max()
            )
            print(
                f"  surplus relation s_y - P = {_fmt4(s)} * (s_x - P) "
                f"(max residual = {deviation:.3e})"
            )
    for path in result.files:
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        if args.command == "payoff":
            return cmd_payoff(args)
        if args.command == "stationary":
            return cmd_stationary(args)
        if args.command == "zd":
            return cmd_zd(args)
        if args.command == "cloud":
            return cmd_cloud(args)
        if args.command == "figure":
            return cmd_figure(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except _BAD_ARGS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _REPORTED as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        target = getattr(exc, "filename", None)
        where = f" ({target})" if target else ""
        print(f"error: filesystem failure{where}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
