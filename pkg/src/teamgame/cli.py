"""Command-line front end: ``teamgame <subcommand> [flags]``.

Subcommands
    simulate       integrate one preset or strategy file, write the trajectory
    branch         evolve opposite perturbations of the constant equilibrium
    reverse        reverse-time construction of a state that evolves to the
                   constant equilibrium, plus forward verification
    spectrum       eigenvalues, kernel basis and exact characteristic
                   polynomial of the discrete operators
    gradient-demo  constrained gradient of a preset and the first Euler update

Flags may also be supplied through a TOML file (``--config run.toml``)
whose keys mirror the flag names; explicit flags win over the file.  All
outputs are CSV (with ``#`` comment headers) plus optional SVG plots, and
identical configuration plus seed produces byte-identical CSV.

Exit codes: 0 success, 2 I/O failure, 3 invalid preset or configuration,
1 any other error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import List, Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import presets, quadrature, spectral, svgplot
from .dynamics import IntegratorConfig, reverse_simulate, simulate, switch_time, write_trajectory_csv
from .operators import apply_A_function, build_operators, write_matrix_csv
from .presets import PresetError
from .strategies import (
    SampledStrategy,
    Strategy,
    mass,
    mca,
    read_strategy_csv,
    validate,
    write_strategy_csv,
)

EXIT_OK = 0
EXIT_IO = 2
EXIT_CONFIG = 3


@dataclass
class RunConfig:
    """Merged command configuration (defaults, TOML file, explicit flags)."""

    command: str
    M: Optional[int] = None
    N: Optional[int] = None
    preset: Optional[str] = None
    file: Optional[str] = None
    T: float = 1.0
    dt: float = 1e-3
    method: str = "rk4"
    delta: float = 0.01
    k: Optional[int] = None
    r: float = 0.75
    epsilon: float = 2.0
    seed: int = 0
    out: str = "out"
    svg: bool = False

    def __post_init__(self):
        for name in ("T", "dt", "delta", "r", "epsilon"):
            if not np.isfinite(getattr(self, name)):
                raise PresetError(f"--{name} must be finite")
        if self.method not in ("euler", "rk4", "closed"):
            raise PresetError(f"--method must be euler, rk4 or closed, got {self.method!r}")
        if self.preset is not None and self.preset not in presets.REGISTRY:
            raise PresetError(
                f"unknown preset {self.preset!r}; available: {', '.join(presets.names())}"
            )

    @property
    def integrator_method(self) -> str:
        return "closed_form" if self.method == "closed" else self.method


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teamgame",
        description="Adaptive dynamics of the game of teams",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--M", type=int, default=None, help="discrete grid order")
        p.add_argument("--N", type=int, default=None, help="sampled grid resolution")
        p.add_argument("--preset", type=str, default=None,
                       help=f"initial condition ({', '.join(presets.names())})")
        p.add_argument("--file", type=str, default=None, help="strategy CSV to load")
        p.add_argument("--T", type=float, default=None, help="time horizon")
        p.add_argument("--dt", type=float, default=None, help="integration step")
        p.add_argument("--method", type=str, default=None, choices=["euler", "rk4", "closed"])
        p.add_argument("--delta", type=float, default=None, help="perturbation size")
        p.add_argument("--k", type=int, default=None, help="perturbation index")
        p.add_argument("--r", type=float, default=None, help="tent kink location")
        p.add_argument("--epsilon", type=float, default=None, help="demo update step")
        p.add_argument("--seed", type=int, default=None, help="PRNG seed for random presets")
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--config", type=str, default=None, help="TOML config file")
        p.add_argument("--svg", action="store_const", const=True, default=None,
                       help="also write SVG plots")

    for name in ("simulate", "branch", "reverse", "spectrum", "gradient-demo"):
        add_common(sub.add_parser(name))
    return parser


def _merge_config(args: argparse.Namespace) -> RunConfig:
    file_values = {}
    if args.config:
        with open(args.config, "rb") as fh:
            file_values = tomllib.load(fh)
    merged = {}
    for f in fields(RunConfig):
        if f.name == "command":
            continue
        cli_value = getattr(args, f.name.replace("-", "_"), None)
        if cli_value is not None:
            merged[f.name] = cli_value
        elif f.name in file_values:
            merged[f.name] = file_values[f.name]
    return RunConfig(command=args.command, **merged)


def _load_initial(cfg: RunConfig, default_M: Optional[int] = None,
                  default_N: Optional[int] = None):
    """Initial state from --file or --preset on the requested grid."""
    if cfg.file:
        return read_strategy_csv(cfg.file)
    if cfg.M is not None and cfg.N is not None:
        raise PresetError("give either --M (discrete) or --N (sampled), not both")
    name = cfg.preset or "constant"
    params = dict(delta=cfg.delta, k=cfg.k, r=cfg.r, seed=cfg.seed)
    if cfg.N is not None:
        return presets.make_sampled(name, cfg.N, **params)
    M = cfg.M if cfg.M is not None else default_M
    if M is not None:
        return presets.make_discrete(name, M, **params)
    if default_N is not None:
        return presets.make_sampled(name, default_N, **params)
    raise PresetError("specify a grid with --M or --N")


def _config_comments(cfg: RunConfig) -> List[str]:
    # output routing (out, svg) is excluded so the CSV bytes depend only on
    # the run-defining configuration plus seed
    pairs = []
    for f in fields(RunConfig):
        if f.name in ("command", "out", "svg"):
            continue
        value = getattr(cfg, f.name)
        if value is not None:
            pairs.append(f"{f.name}={value}")
    return ["teamgame " + cfg.command, " ".join(pairs)]


def _outdir(cfg: RunConfig) -> Path:
    path = Path(cfg.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _traj_components(traj):
    arrays = [s.values if isinstance(s, Strategy) else s.samples for s in traj.states]
    return np.array(arrays).T


def cmd_simulate(cfg: RunConfig) -> int:
    initial = _load_initial(cfg, default_M=50)
    icfg = IntegratorConfig(method=cfg.integrator_method, dt=cfg.dt, T=cfg.T)
    traj = simulate(initial, icfg)
    out = _outdir(cfg)
    csv_path = out / "trajectory.csv"
    write_trajectory_csv(traj, csv_path, comments=_config_comments(cfg))
    ts = switch_time(traj)
    print(f"simulate: {len(traj.times)} samples to t={traj.times[-1]:g}, "
          f"switch={'none' if ts is None else format(ts, 'g')}, wrote {csv_path}")
    if cfg.svg:
        svgplot.trajectory_plot(
            traj.times, _traj_components(traj),
            {"mca": traj.mca, "mass": traj.mass, "l2": traj.l2_norm},
            out / "trajectory.svg", title="components and diagnostics",
        )
    return EXIT_OK


def cmd_branch(cfg: RunConfig) -> int:
    M = cfg.M if cfg.M is not None else 50
    k = cfg.k if cfg.k is not None else M // 2
    icfg = IntegratorConfig(method=cfg.integrator_method, dt=cfg.dt, T=cfg.T)
    out = _outdir(cfg)
    trajs = {}
    for label, sign in (("up", +1.0), ("down", -1.0)):
        initial = presets.make_discrete("perturbed-constant", M, delta=sign * cfg.delta, k=k)
        traj = simulate(initial, icfg)
        write_trajectory_csv(traj, out / f"branch_{label}.csv",
                             comments=_config_comments(cfg) + [f"perturbation {sign * cfg.delta:+g} at k={k}"])
        trajs[label] = traj
    up, down = trajs["up"], trajs["down"]
    ncommon = min(len(up.times), len(down.times))
    ones = np.ones(M + 1)
    residuals = []
    with open(out / "branch_mirror.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,midpoint_residual\n")
        for i in range(ncommon):
            mid = 0.5 * (up.states[i].values + down.states[i].values)
            resid = float(np.max(np.abs(mid - ones)))
            residuals.append(resid)
            fh.write(f"{format(up.times[i], '.17g')},{format(resid, '.17g')}\n")
    worst = max(residuals)
    print(f"branch: max midpoint residual vs equilibrium = {worst:.3e}, wrote {out}")
    if cfg.svg:
        svgplot.trajectory_plot(up.times, _traj_components(up), {"mca": up.mca},
                                out / "branch_up.svg", title=f"+{cfg.delta} at k={k}")
        svgplot.trajectory_plot(down.times, _traj_components(down), {"mca": down.mca},
                                out / "branch_down.svg", title=f"-{cfg.delta} at k={k}")
    return EXIT_OK


def cmd_reverse(cfg: RunConfig) -> int:
    M = cfg.M if cfg.M is not None else 9
    if cfg.T <= 0:
        raise PresetError("reverse requires --T > 0")
    icfg = IntegratorConfig(method=cfg.integrator_method, dt=cfg.dt, T=cfg.T)
    target = Strategy(np.ones(M + 1), M)
    start = reverse_simulate(target, cfg.T, icfg)
    forward = simulate(start, icfg)
    out = _outdir(cfg)
    write_strategy_csv(start, out / "reverse_initial.csv")
    write_trajectory_csv(forward, out / "reverse_forward.csv", comments=_config_comments(cfg))
    err = float(np.max(np.abs(forward.states[-1].values - target.values)))
    min_component = float(np.min(start.values))
    print(f"reverse: round-trip error {err:.3e}, min initial component {min_component:.6g}, "
          f"wrote {out}")
    if min_component < 0:
        print("reverse: warning: initial state has negative components (T too large "
              "for a valid strategy)")
    if cfg.svg:
        svgplot.trajectory_plot(forward.times, _traj_components(forward), {"mca": forward.mca},
                                out / "reverse_forward.svg", title="forward verification")
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> int:
    M = cfg.M if cfg.M is not None else 9
    ops = build_operators(M)
    out = _outdir(cfg)
    spec_L = spectral.compute_spectrum(ops, "L")
    spec_c = spectral.compute_spectrum(ops, "constrained")
    spectral.write_spectrum_csv(spec_L, out / "eigenvalues_unconstrained.csv")
    spectral.write_spectrum_csv(spec_c, out / "eigenvalues_constrained.csv")
    write_matrix_csv(np.array(spec_c.kernel_basis), out / "kernel_basis.csv")
    size = M + 1
    if size <= spectral.EXACT_CHARPOLY_MAX_SIZE:
        direct = spectral.charpoly_direct(M)
        binomial = spectral.charpoly_binomial(M)
        spectral.write_charpoly(direct, out / "charpoly.txt")
        verdict = "PASS" if direct.coefficients == binomial.coefficients else "FAIL"
        print(f"spectrum: char-poly identity {verdict} at size {size}, wrote {out}")
        if verdict == "FAIL":
            return 1
    else:
        print(f"spectrum: size {size} beyond exact char-poly budget "
              f"({spectral.EXACT_CHARPOLY_MAX_SIZE}); wrote numerical spectra to {out}")
    return EXIT_OK


def cmd_gradient_demo(cfg: RunConfig) -> int:
    N = cfg.N if cfg.N is not None else 4096
    name = cfg.preset or "parabola"
    f0 = presets.make_sampled(name, N, delta=cfg.delta, k=cfg.k, r=cfg.r, seed=cfg.seed)
    grad = apply_A_function(f0)
    updated = f0.samples + cfg.epsilon * grad.samples
    negative = updated < 0
    x = quadrature.grid(N)
    out = _outdir(cfg)
    demo_path = out / "gradient_demo.csv"
    with open(demo_path, "w", encoding="utf-8", newline="\n") as fh:
        for line in _config_comments(cfg):
            fh.write(f"# {line}\n")
        fh.write("x,f0,constrained_gradient,updated,update_negative\n")
        for j in range(N + 1):
            fh.write(
                f"{format(x[j], '.17g')},{format(f0.samples[j], '.17g')},"
                f"{format(grad.samples[j], '.17g')},{format(updated[j], '.17g')},"
                f"{int(negative[j])}\n"
            )
    count = int(np.count_nonzero(negative))
    print(f"gradient-demo: preset={name} N={N} epsilon={cfg.epsilon:g}; "
          f"{count} grid points go negative after the update; wrote {demo_path}")
    if cfg.svg:
        svgplot.render_lines(
            [(x, f0.samples, "#000000", 1.5),
             (x, grad.samples, "#cc0000", 1.5),
             (x, updated, "#0055cc", 1.5)],
            out / "gradient_demo.svg", title=f"{name}: state, gradient, update",
        )
    return EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "branch": cmd_branch,
    "reverse": cmd_reverse,
    "spectrum": cmd_spectrum,
    "gradient-demo": cmd_gradient_demo,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args)
        return _COMMANDS[args.command](cfg)
    except PresetError as exc:
        print(f"teamgame {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"teamgame {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, RuntimeError) as exc:
        print(f"teamgame {args.command}: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())
