"""Variable-order fractional differentiation matrices.

Entries are RL derivatives of the Lagrange basis at interior collocation nodes,
computed through the Lagrange-to-Jacobi change of basis.  Boundary rows and
columns are dropped, which imposes homogeneous Dirichlet conditions.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid_basis import (
    CollocationGrid1D,
    lagrange_coefficients,
    lagrange_diff_matrix,
    rl_deriv_basis,
    rl_deriv_basis_subunit,
)
from .vorder import DIFFUSION_TOL, ProfileError, VariableOrderProfile, validate_profile


@dataclass(frozen=True, eq=False)
class FracDiffMatrices:
    """Left/right operators on the ``P - 1`` interior nodes, plus their
    half-difference ``D_minus`` and half-sum ``D_plus``."""

    D_L: np.ndarray
    D_R: np.ndarray
    D_minus: np.ndarray
    D_plus: np.ndarray
    alpha: np.ndarray
    scale: np.ndarray
    grid_key: tuple
    profile: VariableOrderProfile | float

    @property
    def size(self) -> int:
        return self.D_L.shape[0]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


def _check_domain(grid: CollocationGrid1D, profile: VariableOrderProfile) -> None:
    lo, hi = profile.domain
    tol = 1e-12 * (grid.x_hi - grid.x_lo)
    if abs(lo - grid.x_lo) > tol or abs(hi - grid.x_hi) > tol:
        raise ValueError(
            f"profile domain [{lo}, {hi}] does not match grid [{grid.x_lo}, {grid.x_hi}]"
        )


def build_matrices_1d(
    grid: CollocationGrid1D,
    profile: VariableOrderProfile | float,
    validate: bool = True,
    tol: float = DIFFUSION_TOL,
) -> FracDiffMatrices:
    """Assemble ``D_L`` and ``D_R`` for *profile* on *grid*.

    *profile* may also be a constant order, either in ``(1, 2]`` or in
    ``(0, 1]``.  Profiles are checked with :func:`validate_profile` unless
    ``validate=False`` (used to probe deliberately bad layers); *tol* is the
    zone tolerance handed to the validator.
    """
    if isinstance(profile, VariableOrderProfile):
        _check_domain(grid, profile)
        if validate:
            report = validate_profile(profile, tol)
            if not report:
                raise ProfileError(report)
    return _build_cached(grid, profile)


_cache: dict[tuple, FracDiffMatrices] = {}
_CACHE_SIZE = 24


def _build_cached(grid: CollocationGrid1D, profile) -> FracDiffMatrices:
    key = (grid.key, profile)
    hit = _cache.get(key)
    if hit is not None:
        return hit
    mats = _assemble(grid, profile)
    if len(_cache) >= _CACHE_SIZE:
        _cache.pop(next(iter(_cache)))
    _cache[key] = mats
    return mats


def _assemble(grid: CollocationGrid1D, profile) -> FracDiffMatrices:
    if isinstance(profile, VariableOrderProfile):
        alpha = np.asarray(profile(grid.nodes))
    else:
        alpha = np.full(grid.P + 1, float(profile))

    if np.all(alpha > 1.0):
        left = rl_deriv_basis(grid, alpha, "left")
        right = rl_deriv_basis(grid, alpha, "right")
    elif np.all(alpha == alpha[0]):
        left = rl_deriv_basis_subunit(grid, alpha[0], "left")
        right = rl_deriv_basis_subunit(grid, alpha[0], "right")
    else:
        raise ValueError("variable orders must lie in (1, 2]")

    ell = lagrange_coefficients(grid)[:, 1:-1]
    scale = grid.half_length ** -alpha[1:-1]
    D_L = scale[:, None] * (left.values @ ell)
    D_R = scale[:, None] * (right.values @ ell)
    return FracDiffMatrices(
        D_L=_frozen(D_L),
        D_R=_frozen(D_R),
        D_minus=_frozen(0.5 * (D_L - D_R)),
        D_plus=_frozen(0.5 * (D_L + D_R)),
        alpha=_frozen(alpha),
        scale=_frozen(scale),
        grid_key=grid.key,
        profile=profile,
    )


def build_matrices_2d(
    grid_x: CollocationGrid1D,
    grid_y: CollocationGrid1D,
    profile_x: VariableOrderProfile | float,
    profile_y: VariableOrderProfile | float,
    validate: bool = True,
    tol: float = DIFFUSION_TOL,
) -> tuple[FracDiffMatrices, FracDiffMatrices]:
    """Per-axis operator sets.

    On an interior field array ``F`` of shape ``(P_x - 1, P_y - 1)`` the x
    operators act as ``Dx @ F`` and the y operators as ``F @ Dy.T``.
    """
    return (
        build_matrices_1d(grid_x, profile_x, validate, tol),
        build_matrices_1d(grid_y, profile_y, validate, tol),
    )


def apply_x(D: np.ndarray, F: np.ndarray) -> np.ndarray:
    return D @ F


def apply_y(D: np.ndarray, F: np.ndarray) -> np.ndarray:
    return F @ D.T


def first_derivative_interior(grid: CollocationGrid1D) -> np.ndarray:
    """Integer-order spectral first derivative restricted to interior nodes."""
    return _frozen(lagrange_diff_matrix(grid)[1:-1, 1:-1])


def dump_csv(matrix: np.ndarray, path: str | Path) -> None:
    """Row-major plain-text dump, 17 significant digits."""
    with open(path, "w", newline="\n") as fh:
        for row in np.asarray(matrix):
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")
