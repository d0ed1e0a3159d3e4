"""Error metrics and the study drivers built on top of the solvers."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np

from .grid_basis import CollocationGrid1D, jgl_grid
from .pml import DampingProfile, solve_oneway_pml
from .reference import exact_oneway
from .solvers import solve_oneway_fbl
from .vorder import Layer, VariableOrderProfile, validate_profile


class EmptyRegionError(ValueError):
    pass


@dataclass(frozen=True)
class Region:
    """Closed box ``[x0, x1]`` (optionally times ``[y0, y1]``)."""

    x: tuple[float, float]
    y: tuple[float, float] | None = None

    def mask(self, x: np.ndarray, y: np.ndarray | None = None) -> np.ndarray:
        tol = 1e-12
        mx = (x >= self.x[0] - tol) & (x <= self.x[1] + tol)
        if self.y is None:
            return mx
        my = (y >= self.y[0] - tol) & (y <= self.y[1] + tol)
        return mx[:, None] & my[None, :]


def interior_region(profile: VariableOrderProfile, margin: float | None = None) -> Region:
    """The interior with a margin (default: the penetration length) removed
    next to each buffered side."""
    x_L, x_R = profile.interior
    lo = x_L + (profile.left.pen_len if margin is None else margin) if profile.left else x_L
    hi = x_R - (profile.right.pen_len if margin is None else margin) if profile.right else x_R
    return Region((lo, hi))


@dataclass(frozen=True, eq=False)
class ErrorReport:
    times: tuple[float, ...]
    linf: tuple[float, ...]
    pointwise: tuple[np.ndarray, ...]
    nodes: np.ndarray
    region: Region
    provenance: str = ""
    notes: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if any(np.diff(self.times) < 0):
            raise ValueError("snapshot times must be sorted")


def interior_error(values: np.ndarray, reference: np.ndarray, mask: np.ndarray) -> tuple[float, np.ndarray]:
    """``(max |u - ref|, |u - ref|)`` over the masked nodes."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise EmptyRegionError("error region contains no nodes")
    err = np.abs(np.asarray(values) - np.asarray(reference))[mask]
    return float(err.max()), err


def energy_l2(values: np.ndarray, mask: np.ndarray, grid: CollocationGrid1D) -> float:
    """Quadrature L2 norm over the masked nodes of *grid* (full-grid arrays)."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise EmptyRegionError("energy region contains no nodes")
    w = grid.weights * grid.half_length
    return float(np.sqrt(np.sum(w[mask] * np.asarray(values)[mask] ** 2)))


def config_hash(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, default=str).encode()).hexdigest()[:16]


# {{{ one-way studies


@dataclass(frozen=True)
class OnewaySetup:
    """Right-moving Gaussian with a right buffer (the reference one-way case)."""

    interior: tuple[float, float] = (-5.0, 5.0)
    layer: Layer = Layer(1.0, 0.5, 20.0)
    epsilon: float = 1.0e-5
    P: int = 500
    tau: float = 1.0e-3
    center: float = 0.0
    width: float = 1.0
    speed: float = 1.0

    @property
    def profile(self) -> VariableOrderProfile:
        return VariableOrderProfile(self.interior, right=self.layer, epsilon=self.epsilon)

    @property
    def grid(self) -> CollocationGrid1D:
        lo, hi = self.profile.domain
        return jgl_grid(self.P, 0.0, 0.0, lo, hi)

    def u0(self, x):
        return np.exp(-(((x - self.center) / self.width) ** 2))

    def damping(self) -> DampingProfile:
        return DampingProfile(
            self.interior, right=self.layer.length, kind="tanh", pen_len=self.layer.pen_len, slope=self.layer.slope
        )


Formulation = Literal["FBL", "IntAdv-PML", "FracAdv-PML", "FracDiff-PML"]


def run_oneway(setup: OnewaySetup, formulation: Formulation, times: Sequence[float], validate: bool = True):
    grid = setup.grid
    T = max(times)
    if formulation == "FBL":
        return solve_oneway_fbl(
            "right", setup.u0, setup.speed, grid, setup.profile, setup.tau, T, times, validate
        )
    variant = formulation.split("-")[0]
    return solve_oneway_pml(variant, setup.u0, grid, setup.damping(), setup.epsilon, setup.tau, T, times, setup.speed)


def oneway_report(setup: OnewaySetup, formulation: Formulation, times: Sequence[float], validate: bool = True) -> ErrorReport:
    states = run_oneway(setup, formulation, times, validate)
    grid = setup.grid
    region = interior_region(setup.profile)
    mask = region.mask(grid.interior)
    linf, point = [], []
    for s in states:
        ref = exact_oneway(setup.u0, -setup.speed, grid.interior, s.t)
        e, p = interior_error(s.u, ref, mask)
        linf.append(e)
        point.append(p)
    return ErrorReport(
        tuple(s.t for s in states),
        tuple(linf),
        tuple(point),
        grid.interior[mask],
        region,
        config_hash([formulation, repr(setup)]),
    )


P_REFINE_TIME = 6.0


def p_refinement_study(
    formulation: Formulation, P_list: Sequence[int], setup: OnewaySetup = OnewaySetup(), t_eval: float = P_REFINE_TIME
) -> list[tuple[int, float]]:
    """One run per ``P`` (ascending); L-infinity interior error at ``t_eval``."""
    if list(P_list) != sorted(P_list):
        raise ValueError("P_list must be ascending")
    table = []
    for P in P_list:
        rep = oneway_report(replace(setup, P=int(P)), formulation, [t_eval])
        table.append((int(P), rep.linf[0]))
    return table


def plateau_index(errors: Sequence[float], factor: float = 3.0) -> int:
    """First index whose error lies within *factor* of the final value."""
    final = errors[-1]
    for i, e in enumerate(errors):
        if e <= factor * final:
            return i
    return len(errors) - 1


def layer_characterization_study(
    base: OnewaySetup, variants: Sequence[tuple[float, float]], times: Sequence[float] = (6.0,), length: float | None = None
) -> list[ErrorReport]:
    """One report per ``(pen_len, slope)`` variant; profiles that fail
    validation are still run (they are the point of the comparison) and the
    outcome is noted on the report.

    A different layer *length* keeps the node density of *base*: ``P`` is
    scaled with the extended-domain length.
    """
    out = []
    base_len = base.profile.domain[1] - base.profile.domain[0]
    for pen_len, slope in variants:
        layer = Layer(base.layer.length if length is None else length, pen_len, slope)
        setup = replace(base, layer=layer)
        new_len = setup.profile.domain[1] - setup.profile.domain[0]
        setup = replace(setup, P=int(round(base.P * new_len / base_len)))
        ok = bool(validate_profile(setup.profile))
        rep = oneway_report(setup, "FBL", times, validate=False)
        out.append(replace(rep, notes={"pen_len": pen_len, "slope": slope, "profile_valid": ok}))
    return out


def error_decomposition(fine: float, plateau: float, model: float) -> dict[str, float]:
    """Diagnostic split of an interior error into numerical, reflection and
    model parts: ``model`` comes from an eps sweep, ``plateau - model`` is the
    reflection remainder and ``fine - plateau`` the resolution part."""
    return {"E_M": model, "E_R": max(plateau - model, 0.0), "E_N": max(fine - plateau, 0.0)}


# }}}
