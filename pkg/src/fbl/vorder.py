"""Variable-order functions for fractional buffer layers.

A profile is ``1 + eps`` on the interior ``[x_L, x_R]`` and climbs to 2 inside
each attached layer: through a penetration band of length ``pen_len`` and then
a fully diffusive band out to ``length``.  Sides are independent, and a side
with no layer is simply ``None``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

Kind = Literal["step", "tanh"]

DIFFUSION_TOL = 1.0e-3
SAMPLES_PER_ZONE = 1000


@dataclass(frozen=True)
class Layer:
    """One buffer layer: total length, penetration length and tanh slope."""

    length: float
    pen_len: float
    slope: float = 20.0

    def __post_init__(self) -> None:
        if not 0.0 < self.pen_len < self.length:
            raise ValueError(
                f"pen_len must satisfy 0 < pen_len < length, got {self.pen_len} vs {self.length}"
            )
        if self.slope <= 0.0:
            raise ValueError(f"slope must be positive, got {self.slope}")


@dataclass(frozen=True)
class VariableOrderProfile:
    interior: tuple[float, float]
    left: Layer | None = None
    right: Layer | None = None
    epsilon: float = 1.0e-5
    kind: Kind = "tanh"

    def __post_init__(self) -> None:
        x_L, x_R = self.interior
        if not x_L < x_R:
            raise ValueError(f"empty interior [{x_L}, {x_R}]")
        if not 0.0 < self.epsilon < 0.5:
            raise ValueError(f"epsilon must lie in (0, 0.5), got {self.epsilon}")
        if self.kind not in ("step", "tanh"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        object.__setattr__(self, "interior", (float(x_L), float(x_R)))

    @property
    def x_L(self) -> float:
        return self.interior[0]

    @property
    def x_R(self) -> float:
        return self.interior[1]

    @property
    def domain(self) -> tuple[float, float]:
        """Extended domain: the interior plus whatever layers are attached."""
        lo = self.x_L - (self.left.length if self.left else 0.0)
        hi = self.x_R + (self.right.length if self.right else 0.0)
        return lo, hi

    def __call__(self, x):
        return eval_profile(self, x)

    def transition(self, x, side: str):
        """The unclipped tanh ramp of one side (used by validation)."""
        layer = self.left if side == "left" else self.right
        if layer is None:
            raise ValueError(f"no {side} layer")
        x = np.asarray(x, dtype=float)
        if side == "right":
            arg = layer.slope * (x - self.x_R - 0.5 * layer.pen_len)
        else:
            arg = layer.slope * (self.x_L - 0.5 * layer.pen_len - x)
        return 1.5 + (0.5 - self.epsilon) * np.tanh(arg)


def interior_only(x_lo: float, x_hi: float, epsilon: float = 1.0e-5) -> VariableOrderProfile:
    """Profile with no layers: ``1 + eps`` everywhere on ``[x_lo, x_hi]``."""
    return VariableOrderProfile((x_lo, x_hi), epsilon=epsilon)


def eval_profile(profile: VariableOrderProfile, x):
    """Variable order at *x* (scalar or array) on the extended domain."""
    xa = np.asarray(x, dtype=float)
    lo, hi = profile.domain
    span = hi - lo
    if np.any(xa < lo - 1e-12 * span) or np.any(xa > hi + 1e-12 * span):
        raise ValueError(f"x outside the extended domain [{lo}, {hi}]")

    alpha = np.full(xa.shape, 1.0 + profile.epsilon)
    for side, layer in (("left", profile.left), ("right", profile.right)):
        if layer is None:
            continue
        if side == "right":
            depth = xa - profile.x_R
        else:
            depth = profile.x_L - xa
        pen = (depth > 0.0) & (depth <= layer.pen_len)
        diff = depth > layer.pen_len
        if profile.kind == "tanh":
            alpha = np.where(pen, profile.transition(xa, side), alpha)
        alpha = np.where(diff, 2.0, alpha)
    return float(alpha) if alpha.ndim == 0 else alpha


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    worst_x: float | None = None
    worst_value: float | None = None
    worst_violation: float = 0.0
    zone: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def validate_profile(profile: VariableOrderProfile, tol: float = DIFFUSION_TOL) -> ValidationReport:
    """Check the advection / penetration / diffusion zone conditions.

    For the tanh kind the ramp of each layer is sampled over all three zones:
    it must sit within *tol* of ``1 + eps`` across the advection zone, stay in
    ``(1, 2]`` through the penetration band, and be within *tol* of 2 across the
    diffusion zone.  A ramp that is still climbing where the layer declares full
    diffusion is the typical failure.  Step profiles satisfy the conditions by
    construction.
    """
    worst = ValidationReport(True)
    if profile.kind == "step":
        return worst
    x_L, x_R = profile.interior
    for side, layer in (("left", profile.left), ("right", profile.right)):
        if layer is None:
            continue
        s = 1.0 if side == "right" else -1.0
        edge = x_R if side == "right" else x_L
        zones = (
            ("advection", np.linspace(0.0, x_R - x_L, SAMPLES_PER_ZONE), 1.0 + profile.epsilon),
            ("penetration", np.linspace(0.0, layer.pen_len, SAMPLES_PER_ZONE + 1)[1:], None),
            # the diffusion zone is open at pen_len; its limit point is sampled too
            ("diffusion", np.linspace(layer.pen_len, layer.length, SAMPLES_PER_ZONE), 2.0),
        )
        for zone, depth, target in zones:
            if zone == "advection":
                x = edge - s * depth
            else:
                x = edge + s * depth
            ramp = profile.transition(x, side)
            if target is None:
                # any excursion out of (1, 2] fails, however small
                viol = np.where((ramp <= 1.0) | (ramp > 2.0), np.abs(ramp - 1.5) - 0.5 + tol, 0.0)
            else:
                viol = np.abs(ramp - target)
            i = int(np.argmax(viol))
            if viol[i] > tol and viol[i] > worst.worst_violation:
                worst = ValidationReport(False, float(x[i]), float(ramp[i]), float(viol[i]), f"{side} {zone}")
    return worst


class ProfileError(ValueError):
    def __init__(self, report: ValidationReport) -> None:
        super().__init__(
            f"variable-order profile violates the zone conditions in the {report.zone} zone: "
            f"alpha({report.worst_x:.6g}) = {report.worst_value:.6g}"
        )
        self.report = report
