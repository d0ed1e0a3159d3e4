"""Fractional buffer layer simulations.

* one-way advection with a buffer on the outflow side,
* the 1D wave equation split into two decoupled one-way problems,
* the 2D first-order wave system with the coupled D+/D- layer operators.

All fields live on the interior nodes (homogeneous Dirichlet on the extended
boundary).  Snapshot times are mapped to the nearest time step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np

from .frac_ops import FracDiffMatrices, build_matrices_1d, first_derivative_interior
from .grid_basis import CollocationGrid1D, integration_matrix, lagrange_diff_matrix
from .steppers import CNOperator, ab2_step, cn_step
from .vorder import VariableOrderProfile

Func1D = Callable[[np.ndarray], np.ndarray]
Func2D = Callable[[np.ndarray, np.ndarray], np.ndarray]

BOUNDARY_TOL = 1.0e-10
LAYER_TOL_2D = 1.0e-2
SQRT_HALF = np.sqrt(0.5)


class BoundaryDataError(ValueError):
    pass


class MissingHistoryError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SolverState1D:
    t: float
    step: int
    grid: CollocationGrid1D
    u: np.ndarray | None = None
    V: np.ndarray | None = None
    W: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class SolverState2D:
    """``v = u_t``, ``w1 = c u_x``, ``w2 = c u_y`` and the running ``u``.

    Arrays have shape ``(P_x - 1, P_y - 1)``; axis 0 is x.
    """

    t: float
    step: int
    grids: tuple[CollocationGrid1D, CollocationGrid1D]
    v: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    u: np.ndarray

    field_names = ("v", "w1", "w2")


def snapshot_steps(times: Sequence[float], tau: float) -> list[int]:
    return [int(round(t / tau)) for t in times]


def check_boundary(values: np.ndarray, what: str = "u0") -> None:
    m = float(np.max(np.abs(values)))
    if m > BOUNDARY_TOL:
        raise BoundaryDataError(
            f"|{what}| = {m:.3g} on the extended-domain boundary exceeds {BOUNDARY_TOL:g}; "
            "only homogeneous Dirichlet data is supported"
        )


def _check_time(tau: float, T: float, times: Sequence[float]) -> int:
    if not tau > 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    nsteps = int(round(T / tau))
    for t in times:
        if t < 0.0 or t > T + 0.5 * tau:
            raise ValueError(f"snapshot time {t} outside [0, {T}]")
    return nsteps


def _cn_march(ops, y0s, nsteps, observe):
    """March several independent CN systems side by side."""
    ys = list(y0s)
    observe(0, ys)
    for n in range(1, nsteps + 1):
        ys = [cn_step(op, y) for op, y in zip(ops, ys)]
        observe(n, ys)


# {{{ one-way


def solve_oneway_fbl(
    direction: Literal["left", "right"],
    u0: Func1D,
    speed: float,
    grid: CollocationGrid1D,
    profile: VariableOrderProfile,
    tau: float,
    T: float,
    snapshot_times: Sequence[float],
    validate: bool = True,
) -> list[SolverState1D]:
    """Right-moving waves use ``u_t = |V| D_R^alpha u`` with a right buffer,
    left-moving waves ``u_t = |V| D_L^alpha u`` with a left buffer.

    ``validate=False`` skips the zone check, for probing deliberately
    under-resolved layers.
    """
    if speed <= 0.0:
        raise ValueError(f"speed must be positive, got {speed}")
    if direction == "right":
        if profile.right is None or profile.left is not None:
            raise ValueError("right-moving waves need a buffer on the right side only")
    elif direction == "left":
        if profile.left is None or profile.right is not None:
            raise ValueError("left-moving waves need a buffer on the left side only")
    else:
        raise ValueError(f"direction must be 'left' or 'right', got {direction!r}")
    nsteps = _check_time(tau, T, snapshot_times)

    mats = build_matrices_1d(grid, profile, validate)
    A = speed * (mats.D_R if direction == "right" else mats.D_L)
    u_all = np.asarray(u0(grid.nodes), dtype=float)
    check_boundary(u_all[[0, -1]])
    return march_1d(A, u_all[1:-1], grid, tau, nsteps, snapshot_times)


def march_1d(A, u_init, grid, tau, nsteps, snapshot_times) -> list[SolverState1D]:
    """CN march of ``u_t = A u``, returning states at the snapshot times."""
    wanted = snapshot_steps(snapshot_times, tau)
    found: dict[int, np.ndarray] = {}

    def observe(n, ys):
        if n in wanted:
            found[n] = ys[0].copy()

    _cn_march([CNOperator(A, tau)], [u_init], nsteps, observe)
    return [SolverState1D(n * tau, n, grid, u=found[n]) for n in wanted]


# }}}


# {{{ two-way 1D


def split_wave_1d(u0: Func1D, phi: Func1D, c: float, grid: CollocationGrid1D) -> tuple[np.ndarray, np.ndarray]:
    """Initial characteristic fields ``(V, W)`` on the full grid."""
    u = np.asarray(u0(grid.nodes), dtype=float)
    p = np.asarray(phi(grid.nodes), dtype=float)
    check_boundary(u[[0, -1]], "u0")
    check_boundary(p[[0, -1]], "phi")
    w = c * (lagrange_diff_matrix(grid) @ u)
    return split(p, w)


def split(v: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(v, w) -> (V, W)`` with ``V = (w - v)/sqrt2``, ``W = (v + w)/sqrt2``."""
    return SQRT_HALF * (w - v), SQRT_HALF * (v + w)


def recouple(V: np.ndarray, W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`split`: returns ``(v, w)``."""
    return SQRT_HALF * (W - V), SQRT_HALF * (V + W)


def solve_twoway_fbl_1d(
    u0: Func1D,
    phi: Func1D,
    c: float,
    grid: CollocationGrid1D,
    profile_alpha: VariableOrderProfile,
    profile_beta: VariableOrderProfile | None,
    tau: float,
    T: float,
    snapshot_times: Sequence[float],
) -> list[tuple[SolverState1D, np.ndarray]]:
    """March ``V_t = c D_R^alpha V`` and ``W_t = c D_L^beta W`` by CN.

    ``u`` is rebuilt from ``u0`` and the running trapezoidal time integral of
    ``v = (W - V)/sqrt2``.  Returns ``(state, u)`` pairs on interior nodes.
    """
    if c <= 0.0:
        raise ValueError(f"wave speed must be positive, got {c}")
    profile_beta = profile_alpha if profile_beta is None else profile_beta
    for p in (profile_alpha, profile_beta):
        if p.left is None or p.right is None:
            raise ValueError("two-way problems need buffers on both sides")
    nsteps = _check_time(tau, T, snapshot_times)

    mats_a = build_matrices_1d(grid, profile_alpha)
    mats_b = build_matrices_1d(grid, profile_beta)
    V0, W0 = split_wave_1d(u0, phi, c, grid)
    u_init = np.asarray(u0(grid.interior), dtype=float)
    ops = [CNOperator(c * mats_a.D_R, tau), CNOperator(c * mats_b.D_L, tau)]

    wanted = snapshot_steps(snapshot_times, tau)
    integ = TrapezoidIntegrator(u_init, tau)
    found = {}

    def observe(n, ys):
        integ.add(recouple(*ys)[0])
        if n in wanted:
            found[n] = (ys[0].copy(), ys[1].copy(), integ.value.copy())

    _cn_march(ops, [V0[1:-1], W0[1:-1]], nsteps, observe)
    out = []
    for n in wanted:
        V, W, u = found[n]
        out.append((SolverState1D(n * tau, n, grid, V=V, W=W), u))
    return out


# }}}


# {{{ reconstruction


class TrapezoidIntegrator:
    """Running ``u0 + int_0^t v ds`` by the trapezoidal rule on a uniform step."""

    def __init__(self, u_init: np.ndarray, tau: float) -> None:
        self.value = np.array(u_init, dtype=float)
        self.tau = tau
        self._last = None

    def add(self, v: np.ndarray) -> None:
        if self._last is not None:
            self.value += 0.5 * self.tau * (self._last + v)
        self._last = np.array(v, dtype=float)


def reconstruct_u(
    u0_values: np.ndarray | None = None,
    *,
    v_history: Sequence[tuple[float, np.ndarray]] | None = None,
    w: np.ndarray | None = None,
    c: float = 1.0,
    grid: CollocationGrid1D | None = None,
) -> np.ndarray:
    """Rebuild ``u`` from ``u_t`` or ``c u_x``.

    Time path: *v_history* is ``[(t_0, v_0), (t_1, v_1), ...]`` starting at 0
    with one entry per step, and ``u = u0 + int v dt`` (trapezoid).
    Space path: *w* holds ``c u_x`` on the interior nodes of *grid* and
    ``u = (1/c) int_{x_lo}^x w`` by exact integration of the interpolant.
    """
    if (v_history is None) == (w is None):
        raise ValueError("give exactly one of v_history or w")
    if v_history is not None:
        if u0_values is None:
            raise ValueError("the time path needs u0 values")
        ts = np.array([t for t, _ in v_history], dtype=float)
        if ts.size == 0 or ts[0] != 0.0:
            raise MissingHistoryError("v history must start at t = 0")
        if ts.size > 1:
            dt = np.diff(ts)
            if np.any(np.abs(dt - dt[0]) > 1e-9 * max(dt[0], 1e-300)) or dt[0] <= 0:
                raise MissingHistoryError("v history has missing or uneven steps")
            integ = TrapezoidIntegrator(u0_values, float(dt[0]))
        else:
            integ = TrapezoidIntegrator(u0_values, 1.0)
        for _, v in v_history:
            integ.add(v)
        return integ.value
    if grid is None:
        raise ValueError("the space path needs the grid")
    w_full = np.concatenate(([0.0], np.asarray(w, dtype=float), [0.0]))
    return (integration_matrix(grid) @ w_full)[1:-1] / c


# }}}


# {{{ two-way 2D


@dataclass(frozen=True, eq=False)
class Wave2DOperators:
    x: FracDiffMatrices
    y: FracDiffMatrices
    c: float

    def rhs(self, s):
        v, w1, w2 = s
        c = self.c
        X, Y = self.x, self.y
        dv = X.D_minus @ w1 + X.D_plus @ v + w2 @ Y.D_minus.T + v @ Y.D_plus.T
        dw1 = X.D_plus @ w1 + X.D_minus @ v
        dw2 = w2 @ Y.D_plus.T + v @ Y.D_minus.T
        return (c * dv, c * dw1, c * dw2)


def initial_fields_2d(u0: Func2D, phi: Func2D, c: float, gx: CollocationGrid1D, gy: CollocationGrid1D):
    """Return ``(u, v, w1, w2)`` on the interior, after checking boundary data."""
    X, Y = np.meshgrid(gx.nodes, gy.nodes, indexing="ij")
    u = np.asarray(u0(X, Y), dtype=float)
    p = np.asarray(phi(X, Y), dtype=float)
    for arr, name in ((u, "u0"), (p, "phi")):
        check_boundary(np.concatenate((arr[0], arr[-1], arr[:, 0], arr[:, -1])), name)
    w1 = c * (lagrange_diff_matrix(gx) @ u)
    w2 = c * (u @ lagrange_diff_matrix(gy).T)
    inner = (slice(1, -1), slice(1, -1))
    return u[inner], p[inner], w1[inner], w2[inner]


def march_2d(rhs, s0, u_init, grids, tau, nsteps, snapshot_times, extra=None):
    """AB2 march; ``u`` is integrated from the first field by the trapezoid rule."""
    wanted = snapshot_steps(snapshot_times, tau)
    integ = TrapezoidIntegrator(u_init, tau)
    found = {}
    prev, cur = None, s0
    for n in range(nsteps + 1):
        if n > 0:
            prev, cur = cur, ab2_step(rhs, cur, prev, tau)
            if not np.all(np.isfinite(cur[0])):
                raise FloatingPointError(f"non-finite field at step {n}")
        integ.add(cur[0])
        if n in wanted:
            found[n] = (tuple(f.copy() for f in cur), integ.value.copy())
        if extra is not None:
            extra(n, cur)
    return [(n, *found[n]) for n in wanted]


def solve_twoway_fbl_2d(
    u0: Func2D,
    phi: Func2D,
    c: float,
    grids: tuple[CollocationGrid1D, CollocationGrid1D],
    profiles: tuple[VariableOrderProfile, VariableOrderProfile],
    tau: float,
    T: float,
    snapshot_times: Sequence[float],
    observe: Callable[[int, tuple], None] | None = None,
    profile_tol: float = LAYER_TOL_2D,
) -> list[SolverState2D]:
    """AB2 march of the coupled 2D layer system (forward-Euler first step).

    Profiles are validated with *profile_tol*; the default admits the short
    steep layers used on small 2D domains, whose tanh ramp ends a few 1e-3
    short of 2.
    """
    gx, gy = grids
    nsteps = _check_time(tau, T, snapshot_times)
    ops = Wave2DOperators(build_matrices_1d(gx, profiles[0], tol=profile_tol), build_matrices_1d(gy, profiles[1], tol=profile_tol), c)
    u, v, w1, w2 = initial_fields_2d(u0, phi, c, gx, gy)
    snaps = march_2d(ops.rhs, (v, w1, w2), u, grids, tau, nsteps, snapshot_times, observe)
    return [SolverState2D(n * tau, n, (gx, gy), *fields, uu) for n, fields, uu in snaps]


def first_order_wave_rhs(gx: CollocationGrid1D, gy: CollocationGrid1D, c: float):
    """Right-hand side of the undamped first-order 2D wave system."""
    Dx = first_derivative_interior(gx)
    Dy = first_derivative_interior(gy)

    def rhs(s):
        v, w1, w2 = s
        return (c * (Dx @ w1 + w2 @ Dy.T), c * (Dx @ v), c * (v @ Dy.T))

    return rhs


# }}}
