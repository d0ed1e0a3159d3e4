"""Perfectly matched layer baselines.

1D: three one-way formulations sharing the damping term ``-sigma u``:

* ``IntAdv``   ``u_t = V u_x``, inflow condition only;
* ``FracAdv``  ``u_t = V D_L^{1-eps} u``, inflow condition only;
* ``FracDiff`` ``u_t = |V| D_R^{1+eps} u``, conditions at both ends.

2D: the split-field systems PML I (four fields) and PML II (five fields),
marched by AB2 with homogeneous Dirichlet conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np

from .frac_ops import build_matrices_1d, first_derivative_interior
from .grid_basis import CollocationGrid1D, lagrange_coefficients, lagrange_diff_matrix, rl_jacobi_table
from .solvers import (
    SolverState1D,
    _check_time,
    check_boundary,
    initial_fields_2d,
    march_2d,
    snapshot_steps,
)
from .steppers import CNOperator, cn_step

Variant1D = Literal["IntAdv", "FracAdv", "FracDiff"]
Variant2D = Literal["I", "II"]

DEFAULT_ETA = 100.0


@dataclass(frozen=True)
class DampingProfile:
    """Damping ``sigma(x) >= 0`` that vanishes on ``interior``.

    ``kind="tanh"`` is the variable-order ramp minus one with zero offset: it
    climbs from 0 to 1 across a penetration band of ``pen_len`` (slope
    ``slope``) and stays at 1 out to the layer edge.  ``kind="linear"`` is
    ``eta * depth / length``.  A side with ``None`` length has no layer.
    """

    interior: tuple[float, float]
    left: float | None = None
    right: float | None = None
    kind: Literal["tanh", "linear"] = "linear"
    pen_len: float = 0.5
    slope: float = 20.0
    eta: float = DEFAULT_ETA

    def __post_init__(self) -> None:
        if self.kind not in ("tanh", "linear"):
            raise ValueError(f"unknown damping kind {self.kind!r}")
        if self.eta < 0.0:
            raise ValueError(f"eta must be non-negative, got {self.eta}")
        for side in (self.left, self.right):
            if side is not None and self.kind == "tanh" and not 0.0 < self.pen_len < side:
                raise ValueError("tanh damping needs 0 < pen_len < layer length")

    @property
    def domain(self) -> tuple[float, float]:
        return (self.interior[0] - (self.left or 0.0), self.interior[1] + (self.right or 0.0))

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        sigma = np.zeros_like(x)
        x_L, x_R = self.interior
        for length, depth in ((self.left, x_L - x), (self.right, x - x_R)):
            if length is None:
                continue
            inside = depth > 0.0
            if self.kind == "linear":
                val = self.eta * depth / length
            else:
                ramp = 0.5 + 0.5 * np.tanh(self.slope * (depth - 0.5 * self.pen_len))
                val = np.where(depth <= self.pen_len, ramp, 1.0)
            sigma = np.where(inside, val, sigma)
        return sigma


def no_damping(interior: tuple[float, float]) -> DampingProfile:
    return DampingProfile(interior, kind="linear", eta=0.0)


# {{{ one-way


def _fracadv_matrix(grid: CollocationGrid1D, order: float) -> np.ndarray:
    """Left-sided ``D_L^order`` (order in (0, 1]) on nodes ``1..P``, inflow node dropped."""
    xi = grid.ref_nodes[1:]
    table, _ = rl_jacobi_table(xi, order, grid.P, grid.a, grid.b, "left")
    ell = lagrange_coefficients(grid)[:, 1:]
    return grid.half_length**-order * (table @ ell)


def oneway_pml_operator(
    variant: Variant1D, grid: CollocationGrid1D, damping: DampingProfile, epsilon: float = 1.0e-5, speed: float = 1.0
) -> tuple[np.ndarray, slice]:
    """System matrix for a right-moving wave (``V = -speed``) and the slice of
    grid nodes it acts on."""
    if variant == "IntAdv":
        keep = slice(1, None)
        L = -speed * lagrange_diff_matrix(grid)[keep, keep]
    elif variant == "FracAdv":
        if not 0.0 < epsilon < 1.0:
            raise ValueError("FracAdv needs 0 < eps < 1 (order 1 - eps)")
        keep = slice(1, None)
        L = -speed * _fracadv_matrix(grid, 1.0 - epsilon)
    elif variant == "FracDiff":
        if not 0.0 < epsilon <= 1.0:
            raise ValueError("FracDiff needs 0 < eps <= 1 (order 1 + eps)")
        keep = slice(1, -1)
        L = speed * np.array(build_matrices_1d(grid, 1.0 + epsilon).D_R)
    else:
        raise ValueError(f"unknown one-way PML variant {variant!r}")
    sigma = damping(grid.nodes[keep])
    return L - np.diag(sigma), keep


def solve_oneway_pml(
    variant: Variant1D,
    u0: Callable,
    grid: CollocationGrid1D,
    damping: DampingProfile,
    epsilon: float,
    tau: float,
    T: float,
    snapshot_times: Sequence[float],
    speed: float = 1.0,
) -> list[SolverState1D]:
    """CN march of a right-moving wave with the chosen damped operator.

    States carry ``u`` on the interior nodes, like the layer solvers.
    """
    nsteps = _check_time(tau, T, snapshot_times)
    A, keep = oneway_pml_operator(variant, grid, damping, epsilon, speed)
    u_all = np.asarray(u0(grid.nodes), dtype=float)
    check_boundary(u_all[[0, -1]])
    op = CNOperator(A, tau)
    wanted = snapshot_steps(snapshot_times, tau)
    n_int = grid.P - 1
    u = u_all[keep].copy()
    out = {}
    for n in range(nsteps + 1):
        if n > 0:
            u = cn_step(op, u)
        if n in wanted:
            out[n] = u[:n_int].copy()
    return [SolverState1D(n * tau, n, grid, u=out[n]) for n in wanted]


# }}}


# {{{ 2D


@dataclass(frozen=True, eq=False)
class PMLState2D:
    t: float
    step: int
    v: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    aux: dict[str, np.ndarray] = field(default_factory=dict)
    u: np.ndarray | None = None

    @property
    def field_names(self) -> tuple[str, ...]:
        return ("v", "w1", "w2") + tuple(self.aux)


PML_FIELDS = {"I": ("v", "w1", "w2", "psi"), "II": ("v", "w1", "w2", "Q", "R")}


def pml2d_rhs(
    variant: Variant2D, gx: CollocationGrid1D, gy: CollocationGrid1D, damping_x: DampingProfile, damping_y: DampingProfile, c: float
):
    Dx = first_derivative_interior(gx)
    DyT = first_derivative_interior(gy).T
    sx = damping_x(gx.interior)[:, None]
    sy = damping_y(gy.interior)[None, :]

    if variant == "I":
        # only the x damping enters this system
        def rhs(s):
            v, w1, w2, psi = s
            w2y = w2 @ DyT
            return (
                c * (Dx @ w1) + c * w2y - sx * v + psi,
                c * (Dx @ v) - sx * w1,
                c * (v @ DyT),
                c * sx * w2y,
            )

    elif variant == "II":

        def rhs(s):
            v, w1, w2, Q, R = s
            return (
                c * (Dx @ w1) + c * (w2 @ DyT) - (sx + sy) * v + c * sx * (Q @ DyT) + c * sy * (Dx @ R),
                c * (Dx @ v) - sx * w1,
                c * (v @ DyT) - sy * w2,
                w2,
                w1,
            )

    else:
        raise ValueError(f"unknown 2D PML variant {variant!r}")
    return rhs


def solve_wave2d_pml(
    variant: Variant2D,
    u0: Callable,
    phi: Callable,
    c: float,
    grids: tuple[CollocationGrid1D, CollocationGrid1D],
    damping_x: DampingProfile,
    damping_y: DampingProfile,
    tau: float,
    T: float,
    snapshot_times: Sequence[float],
    observe: Callable[[int, tuple], None] | None = None,
) -> list[PMLState2D]:
    gx, gy = grids
    nsteps = _check_time(tau, T, snapshot_times)
    rhs = pml2d_rhs(variant, gx, gy, damping_x, damping_y, c)
    u, v, w1, w2 = initial_fields_2d(u0, phi, c, gx, gy)
    names = PML_FIELDS[variant]
    s0 = (v, w1, w2) + tuple(np.zeros_like(v) for _ in names[3:])
    snaps = march_2d(rhs, s0, u, grids, tau, nsteps, snapshot_times, observe)
    return [
        PMLState2D(n * tau, n, f[0], f[1], f[2], dict(zip(names[3:], f[3:])), uu) for n, f, uu in snaps
    ]


# }}}
