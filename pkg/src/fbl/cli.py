"""Batch command line: one subcommand per experiment family.

Exit status: 0 success, 1 invalid configuration, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import ConfigError, SimulationConfig, parse_config, serialize
from .diagnostics import (
    OnewaySetup,
    Region,
    interior_error,
    interior_region,
    layer_characterization_study,
    p_refinement_study,
)
from .grid_basis import ConvergenceError, jgl_grid
from .pml import DampingProfile, solve_oneway_pml, solve_wave2d_pml
from .reference import ContainmentError, UnsupportedCaseError, exact_dalembert, exact_oneway, reference_2d
from .solvers import BoundaryDataError, solve_oneway_fbl, solve_twoway_fbl_1d, solve_twoway_fbl_2d
from .steppers import SingularSystemError
from .vorder import ProfileError

VALIDATION_ERRORS = (ConfigError, ProfileError, BoundaryDataError, ContainmentError, UnsupportedCaseError)
NUMERICAL_ERRORS = (FloatingPointError, SingularSystemError, ConvergenceError, np.linalg.LinAlgError, ArithmeticError)


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) if not isinstance(v, str) else v for v in row) + "\n")


def tag(t: float) -> str:
    return format(float(t), "g")


# {{{ runners


def _grid(ax):
    lo, hi = ax.bounds
    return jgl_grid(ax.P, 0.0, 0.0, lo, hi)


def _oneway_setup(cfg: SimulationConfig) -> OnewaySetup:
    if cfg.direction != "right" or len(cfg.initial.center) != 1:
        raise ConfigError("validation", "studies use a right-moving 1D Gaussian")
    return OnewaySetup(
        interior=cfg.x.interior,
        layer=cfg.x.right.to_layer(),
        epsilon=cfg.epsilon,
        P=cfg.x.P,
        tau=cfg.tau,
        center=cfg.initial.center[0],
        width=cfg.initial.width,
        speed=cfg.speed,
    )


def run_oneway(cfg: SimulationConfig, out: Path) -> dict:
    grid = _grid(cfg.x)
    profile = cfg.profile("x")
    u0 = cfg.initial
    if cfg.method == "fbl":
        states = solve_oneway_fbl(cfg.direction, u0, cfg.speed, grid, profile, cfg.tau, cfg.T, cfg.snapshot_times)
    else:
        if cfg.direction != "right":
            raise ConfigError("validation", "one-way PML baselines are implemented for right-moving waves")
        layer = cfg.x.right
        damping = DampingProfile(cfg.x.interior, right=layer.length, kind="tanh", pen_len=layer.pen_len, slope=layer.slope)
        variant = {"intadv-pml": "IntAdv", "fracadv-pml": "FracAdv", "fracdiff-pml": "FracDiff"}[cfg.method]
        states = solve_oneway_pml(variant, u0, grid, damping, cfg.epsilon, cfg.tau, cfg.T, cfg.snapshot_times, cfg.speed)
    V = -cfg.speed if cfg.direction == "right" else cfg.speed
    refs = [exact_oneway(u0, V, grid.interior, s.t) for s in states]
    return _write_1d(out, grid, profile, states, [s.u for s in states], refs)


def run_wave1d(cfg: SimulationConfig, out: Path) -> dict:
    grid = _grid(cfg.x)
    profile = cfg.profile("x")
    res = solve_twoway_fbl_1d(cfg.initial, cfg.velocity(), cfg.speed, grid, profile, None, cfg.tau, cfg.T, cfg.snapshot_times)
    states = [s for s, _ in res]
    if cfg.initial_velocity is None:
        refs = [exact_dalembert(cfg.initial, grid.interior, s.t, cfg.speed) for s in states]
    else:
        refs = [None for _ in states]
    return _write_1d(out, grid, profile, states, [u for _, u in res], refs)


def _write_1d(out, grid, profile, states, fields, refs) -> dict:
    mask = interior_region(profile).mask(grid.interior)
    errors = []
    for s, u, ref in zip(states, fields, refs):
        if ref is None:
            ref = np.full_like(u, np.nan)
        err = np.abs(u - ref)
        write_csv(out / f"snapshot_t{tag(s.t)}.csv", "x,u_num,u_ref,abs_err", zip(grid.interior, u, ref, err))
        errors.append((s.t, interior_error(u, ref, mask)[0]))
    write_csv(out / "errors.csv", "t,linf_interior", errors)
    return {"errors": errors}


def _damping_2d(cfg: SimulationConfig, axis: str, method: str) -> DampingProfile:
    ax = getattr(cfg, axis)
    if method == "pml2":
        return DampingProfile(ax.interior, ax.left.length, ax.right.length, kind="linear", eta=cfg.eta)
    return DampingProfile(ax.interior, ax.left.length, ax.right.length, kind="tanh", pen_len=ax.left.pen_len, slope=ax.left.slope)


def solve_2d(cfg: SimulationConfig, method: str):
    gx, gy = _grid(cfg.x), _grid(cfg.y)
    if method == "fbl":
        return solve_twoway_fbl_2d(
            cfg.initial, cfg.velocity(), cfg.speed, (gx, gy), (cfg.profile("x"), cfg.profile("y")),
            cfg.tau, cfg.T, cfg.snapshot_times, profile_tol=cfg.tol,
        )
    variant = "I" if method == "pml1" else "II"
    return solve_wave2d_pml(
        variant, cfg.initial, cfg.velocity(), cfg.speed, (gx, gy),
        _damping_2d(cfg, "x", method), _damping_2d(cfg, "y", method), cfg.tau, cfg.T, cfg.snapshot_times,
    )


def reference_for(cfg: SimulationConfig):
    ref = cfg.reference
    if ref is None or ref.kind != "big-domain-2d":
        return None
    gx, gy = _grid(cfg.x), _grid(cfg.y)
    return reference_2d(
        cfg.initial, cfg.velocity(), cfg.speed, ref.big_bounds, ref.P_ref, ref.tau_ref or cfg.tau,
        cfg.snapshot_times, gx.interior, gy.interior, cfg.initial.support_radius(),
    )


def region_2d(cfg: SimulationConfig) -> Region:
    rx = interior_region(cfg.profile("x")).x
    ry = interior_region(cfg.profile("y")).x
    return Region(rx, ry)


def run_wave2d(cfg: SimulationConfig, out: Path, method: str | None = None) -> dict:
    method = method or cfg.method
    states = solve_2d(cfg, method)
    ref = reference_for(cfg)
    gx, gy = _grid(cfg.x), _grid(cfg.y)
    X, Y = np.meshgrid(gx.interior, gy.interior, indexing="ij")
    mask = region_2d(cfg).mask(gx.interior, gy.interior)
    errors = []
    for i, s in enumerate(states):
        write_csv(out / f"snapshot_t{tag(s.t)}.csv", "x,y,u_num", zip(X.ravel(), Y.ravel(), s.u.ravel()))
        if ref is not None:
            r = ref.fields[i]
            write_csv(out / f"reference_t{tag(s.t)}.csv", "x,y,u_ref", zip(X.ravel(), Y.ravel(), r.ravel()))
            errors.append((s.t, interior_error(s.u, r, mask)[0]))
    if ref is not None:
        write_csv(out / "errors.csv", "t,linf_interior", errors)
    return {"errors": errors}


def run_compare(cfg: SimulationConfig, out: Path) -> dict:
    if cfg.problem != "wave2d":
        raise ConfigError("validation", "compare runs the 2D layer comparison")
    ref = reference_for(cfg)
    if ref is None:
        raise ConfigError("validation", "compare needs a big-domain-2d reference")
    gx, gy = _grid(cfg.x), _grid(cfg.y)
    mask = region_2d(cfg).mask(gx.interior, gy.interior)
    rows, result = [], {}
    for method in ("fbl", "pml1", "pml2"):
        for i, s in enumerate(solve_2d(cfg, method)):
            e = interior_error(s.u, ref.fields[i], mask)[0]
            rows.append((method, s.t, e))
            result.setdefault(method, []).append((s.t, e))
    write_csv(out / "compare.csv", "method,t,linf_interior", rows)
    return result


def run_prefine(cfg: SimulationConfig, out: Path, method: str | None = None) -> dict:
    if cfg.problem != "oneway":
        raise ConfigError("validation", "prefine runs the one-way study")
    if not cfg.P_list:
        raise ConfigError("validation", "prefine needs P_list")
    name = {"fbl": "FBL", "intadv-pml": "IntAdv-PML", "fracadv-pml": "FracAdv-PML", "fracdiff-pml": "FracDiff-PML"}
    form = name[method or cfg.method]
    t_eval = max(cfg.snapshot_times)
    table = p_refinement_study(form, cfg.P_list, _oneway_setup(cfg), t_eval)
    write_csv(out / "prefine.csv", "P,linf", table)
    return {"formulation": form, "t_eval": t_eval, "table": table}


def run_layers(cfg: SimulationConfig, out: Path) -> dict:
    if cfg.problem != "oneway" or not cfg.variants:
        raise ConfigError("validation", "layers runs the one-way study and needs variants")
    reports = layer_characterization_study(_oneway_setup(cfg), cfg.variants, cfg.snapshot_times, cfg.variant_length)
    rows = []
    for r in reports:
        for t, e in zip(r.times, r.linf):
            rows.append((r.notes["pen_len"], r.notes["slope"], t, e, "1" if r.notes["profile_valid"] else "0"))
    write_csv(out / "layers.csv", "pen_len,slope,t,linf_interior,profile_valid", rows)
    return {"rows": rows}


# }}}


COMMANDS = ("oneway", "wave1d", "wave2d", "prefine", "layers", "compare")


def run(cfg: SimulationConfig, command: str, out: Path, method: str | None = None) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    if command in ("oneway", "wave1d", "wave2d") and cfg.problem != command:
        raise ConfigError("validation", f"config problem {cfg.problem!r} does not match command {command!r}")
    if command == "oneway":
        return run_oneway(cfg, out)
    if command == "wave1d":
        return run_wave1d(cfg, out)
    if command == "wave2d":
        return run_wave2d(cfg, out, method)
    if command == "prefine":
        return run_prefine(cfg, out, method)
    if command == "layers":
        return run_layers(cfg, out)
    if command == "compare":
        return run_compare(cfg, out)
    raise ValueError(f"unknown command {command!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fbl", description="Fractional buffer layer experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path, help="JSON run configuration")
        p.add_argument("--out", type=Path, default=None, help="output directory (overrides the config)")
        p.add_argument("--snapshots", default=None, help="comma-separated snapshot times")
        p.add_argument("--method", default=None, help="solver method (overrides the config)")
    return parser


def _apply_overrides(cfg: SimulationConfig, args) -> SimulationConfig:
    data = json.loads(serialize(cfg))
    if args.snapshots:
        times = [float(t) for t in args.snapshots.split(",") if t.strip()]
        data["snapshot_times"] = times
        data["T"] = max([data["T"]] + times)
    if args.method and args.command != "prefine":
        data["method"] = args.method
    if args.out is not None:
        data["output_dir"] = str(args.out)
    return parse_config(json.dumps(data))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = args.out if args.out is not None else Path("out")
    started = time.time()
    try:
        text = args.config.read_text(encoding="utf-8")
        cfg = _apply_overrides(parse_config(text), args)
        out = Path(cfg.output_dir)
        method = args.method if args.command == "prefine" else None
        result = run(cfg, args.command, out, method)
    except VALIDATION_ERRORS as exc:
        return _fail(out, args.command, exc, 1)
    except OSError as exc:
        return _fail(out, args.command, exc, 1)
    except NUMERICAL_ERRORS as exc:
        return _fail(out, args.command, exc, 2)
    manifest = {
        "command": args.command,
        "config": json.loads(serialize(cfg)),
        "versions": {
            "fbl": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "wall_time_s": time.time() - started,
        "result": result,
    }
    with open(out / "manifest.json", "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, default=float)
        fh.write("\n")
    return 0


def _fail(out: Path, command: str, exc: BaseException, code: int) -> int:
    msg = f"{command}: {type(exc).__name__}: {exc}"
    print(msg, file=sys.stderr)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "error.txt").write_text(msg + "\n", encoding="utf-8")
    except OSError:
        pass
    return code


if __name__ == "__main__":
    sys.exit(main())
