"""Exact and high-resolution reference solutions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np
from scipy.interpolate import barycentric_interpolate

from .grid_basis import jgl_grid, lagrange_diff_matrix


class ContainmentError(ValueError):
    pass


class UnsupportedCaseError(ValueError):
    pass


@dataclass(frozen=True)
class ReferenceSpec:
    kind: Literal["exact-oneway", "dalembert", "big-domain-2d"]
    c: float = 1.0
    big_bounds: tuple[float, float] = (-5.0, 5.0)
    P_ref: int = 120
    tau_ref: float = 1.0e-5
    support_radius: float = 2.75


def exact_oneway(u0: Callable, V: float, x, t: float):
    """Solution of ``u_t = V u_x``: the translate ``u0(x + V t)``."""
    return u0(np.asarray(x, dtype=float) + V * t)


def exact_dalembert(u0: Callable, x, t: float, c: float = 1.0, phi: Callable | None = None):
    """``(u0(x + ct) + u0(x - ct)) / 2``; only zero initial velocity is covered."""
    if phi is not None:
        probe = np.asarray(phi(np.linspace(-1e3, 1e3, 2001)))
        if np.any(probe != 0.0):
            raise UnsupportedCaseError("d'Alembert reference is only available for zero initial velocity")
    x = np.asarray(x, dtype=float)
    return 0.5 * (u0(x + c * t) + u0(x - c * t))


@dataclass(frozen=True, eq=False)
class Reference2D:
    times: tuple[float, ...]
    x: np.ndarray
    y: np.ndarray
    fields: tuple[np.ndarray, ...]

    def at(self, t: float) -> np.ndarray:
        i = int(np.argmin(np.abs(np.asarray(self.times) - t)))
        return self.fields[i]


def dirichlet_second_derivative(P: int, lo: float, hi: float):
    """Grid and Dirichlet-trimmed spectral second derivative on its interior."""
    g = jgl_grid(P, 0.0, 0.0, lo, hi)
    D = lagrange_diff_matrix(g)
    return g, (D @ D)[1:-1, 1:-1]


def reference_2d(
    u0: Callable,
    phi: Callable,
    c: float,
    big_bounds: tuple[float, float],
    P_ref: int,
    tau_ref: float,
    snapshot_times: Sequence[float],
    target_x: np.ndarray,
    target_y: np.ndarray,
    support_radius: float,
) -> Reference2D:
    """Leapfrog / spectral solve of ``u_tt = c^2 Lap u`` on a large square.

    The first step uses the Taylor start ``u1 = u0 + tau phi + tau^2/2 c^2 Lap u0``.
    Results are interpolated onto ``target_x`` x ``target_y`` with barycentric
    Lagrange interpolation.  *support_radius* bounds where the initial data is
    numerically nonzero, measured from the origin.
    """
    lo, hi = big_bounds
    half = 0.5 * (hi - lo)
    t_max = max(snapshot_times) if len(snapshot_times) else 0.0
    if c * t_max + support_radius >= half:
        raise ContainmentError(
            f"wave reaches the reference boundary: c*t + r = {c * t_max + support_radius:g} >= {half:g}"
        )
    g, D2 = dirichlet_second_derivative(P_ref, lo, hi)
    X, Y = np.meshgrid(g.interior, g.interior, indexing="ij")
    u_prev = np.asarray(u0(X, Y), dtype=float)
    p = np.asarray(phi(X, Y), dtype=float)
    c2 = c * c

    def lap(u):
        return D2 @ u + u @ D2.T

    wanted = [int(round(t / tau_ref)) for t in snapshot_times]
    found = {}
    if 0 in wanted:
        found[0] = u_prev.copy()
    nsteps = max(wanted) if wanted else 0
    u_cur = u_prev + tau_ref * p + 0.5 * tau_ref**2 * c2 * lap(u_prev)
    if 1 in wanted:
        found[1] = u_cur.copy()
    k = tau_ref**2 * c2
    for n in range(2, nsteps + 1):
        u_prev, u_cur = u_cur, 2.0 * u_cur - u_prev + k * lap(u_cur)
        if n in wanted:
            found[n] = u_cur.copy()

    full = g.nodes
    out = []
    for n in wanted:
        F = np.zeros((full.size, full.size))
        F[1:-1, 1:-1] = found[n]
        Fx = barycentric_interpolate(full, F, target_x, axis=0)
        out.append(barycentric_interpolate(full, Fx, target_y, axis=1))
    return Reference2D(tuple(n * tau_ref for n in wanted), np.asarray(target_x), np.asarray(target_y), tuple(out))
