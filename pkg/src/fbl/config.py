"""Strict JSON run configuration."""

from __future__ import annotations

import json
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .vorder import Layer, VariableOrderProfile, ProfileError, validate_profile

Problem = Literal["oneway", "wave1d", "wave2d"]
Method = Literal["fbl", "pml1", "pml2", "intadv-pml", "fracadv-pml", "fracdiff-pml"]

METHODS_BY_PROBLEM = {
    "oneway": ("fbl", "intadv-pml", "fracadv-pml", "fracdiff-pml"),
    "wave1d": ("fbl",),
    "wave2d": ("fbl", "pml1", "pml2"),
}


class ConfigError(ValueError):
    """Bad configuration.  ``kind`` is ``parse``, ``schema`` or ``validation``."""

    def __init__(self, kind: str, message: str) -> None:
        super().__init__(f"{kind} error: {message}")
        self.kind = kind


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True, frozen=True)


class LayerConfig(_Strict):
    length: float = Field(gt=0)
    pen_len: float = Field(gt=0)
    slope: float = Field(default=20.0, gt=0)

    @model_validator(mode="after")
    def _pen_inside(self):
        if not self.pen_len < self.length:
            raise ValueError(f"pen_len ({self.pen_len}) must be smaller than length ({self.length})")
        return self

    def to_layer(self) -> Layer:
        return Layer(self.length, self.pen_len, self.slope)


class AxisConfig(_Strict):
    interior: tuple[float, float]
    left: LayerConfig | None = None
    right: LayerConfig | None = None
    P: int = Field(ge=2)

    @model_validator(mode="after")
    def _ordered(self):
        if not self.interior[0] < self.interior[1]:
            raise ValueError("interior must satisfy lo < hi")
        return self

    @property
    def bounds(self) -> tuple[float, float]:
        lo = self.interior[0] - (self.left.length if self.left else 0.0)
        hi = self.interior[1] + (self.right.length if self.right else 0.0)
        return lo, hi


class Gaussian(_Strict):
    """``amplitude * exp(-|x - center|^2 / width^2)``."""

    center: tuple[float, ...] = (0.0,)
    width: float = Field(default=1.0, gt=0)
    amplitude: float = 1.0

    def __call__(self, *coords):
        r2 = 0.0
        for i, x in enumerate(coords):
            c = self.center[i] if i < len(self.center) else 0.0
            r2 = r2 + (np.asarray(x, dtype=float) - c) ** 2
        return self.amplitude * np.exp(-r2 / self.width**2)

    def support_radius(self, floor: float = 1.0e-14) -> float:
        """Distance from the origin beyond which the profile is below *floor*."""
        if self.amplitude == 0.0:
            return 0.0
        spread = self.width * math.sqrt(max(math.log(abs(self.amplitude) / floor), 0.0))
        return math.hypot(*self.center) + spread


class ReferenceConfig(_Strict):
    kind: Literal["exact-oneway", "dalembert", "big-domain-2d"]
    big_bounds: tuple[float, float] = (-5.0, 5.0)
    P_ref: int = Field(default=120, ge=2)
    tau_ref: float | None = Field(default=None, gt=0)


class SimulationConfig(_Strict):
    problem: Problem
    method: Method = "fbl"
    x: AxisConfig
    y: AxisConfig | None = None
    epsilon: float = Field(default=1.0e-5, gt=0, lt=0.5)
    speed: float = Field(default=1.0, gt=0)
    direction: Literal["left", "right"] = "right"
    initial: Gaussian = Gaussian()
    initial_velocity: Gaussian | None = None
    tau: float = Field(gt=0)
    T: float = Field(gt=0)
    snapshot_times: tuple[float, ...]
    reference: ReferenceConfig | None = None
    eta: float = Field(default=100.0, ge=0)
    profile_tol: float | None = Field(default=None, gt=0)
    P_list: tuple[int, ...] | None = None
    variants: tuple[tuple[float, float], ...] | None = None
    variant_length: float | None = Field(default=None, gt=0)
    output_dir: str = "out"

    @model_validator(mode="after")
    def _consistent(self):
        if self.method not in METHODS_BY_PROBLEM[self.problem]:
            raise ValueError(f"method {self.method!r} is not available for problem {self.problem!r}")
        if self.problem == "wave2d" and self.y is None:
            raise ValueError("wave2d needs a y axis")
        if self.problem != "wave2d" and self.y is not None:
            raise ValueError("only wave2d takes a y axis")
        for t in self.snapshot_times:
            if t < 0 or t > self.T + 0.5 * self.tau:
                raise ValueError(f"snapshot time {t} outside [0, T]")
        if self.P_list is not None and list(self.P_list) != sorted(self.P_list):
            raise ValueError("P_list must be ascending")
        return self

    # derived objects

    @property
    def tol(self) -> float:
        if self.profile_tol is not None:
            return self.profile_tol
        return 1.0e-2 if self.problem == "wave2d" else 1.0e-3

    def profile(self, axis: str = "x") -> VariableOrderProfile:
        ax = self.x if axis == "x" else self.y
        return VariableOrderProfile(
            ax.interior,
            left=ax.left.to_layer() if ax.left else None,
            right=ax.right.to_layer() if ax.right else None,
            epsilon=self.epsilon,
        )

    def velocity(self):
        if self.initial_velocity is None:
            return lambda *xs: np.zeros_like(np.asarray(xs[0], dtype=float))
        return self.initial_velocity


def _format_loc(loc) -> str:
    return ".".join(str(p) for p in loc) or "<root>"


def parse_config(text: str) -> SimulationConfig:
    """Parse and fully validate a JSON document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("parse", f"{exc.msg} at line {exc.lineno}, column {exc.colno}") from exc
    try:
        cfg = SimulationConfig.model_validate_json(json.dumps(data), strict=True)
    except ValidationError as exc:
        msgs = [f"{_format_loc(e['loc'])}: {e['msg']}" for e in exc.errors()]
        raise ConfigError("schema", "; ".join(msgs)) from exc
    validate_semantics(cfg)
    return cfg


def validate_semantics(cfg: SimulationConfig) -> None:
    """Profile zone checks, layer placement, boundary data and containment."""
    axes = ("x", "y") if cfg.problem == "wave2d" else ("x",)
    for axis in axes:
        ax = getattr(cfg, axis)
        if cfg.problem == "oneway":
            want = "right" if cfg.direction == "right" else "left"
            other = "left" if want == "right" else "right"
            if getattr(ax, want) is None or getattr(ax, other) is not None:
                raise ConfigError("validation", f"{axis}: one-way runs need a buffer on the {want} side only")
        elif ax.left is None or ax.right is None:
            raise ConfigError("validation", f"{axis}: two-way runs need buffers on both sides")
        if cfg.method == "fbl":
            report = validate_profile(cfg.profile(axis), cfg.tol)
            if not report:
                raise ConfigError("validation", f"{axis}: {ProfileError(report)}")
        lo, hi = ax.bounds
        ends = np.array([lo, hi])
        vals = [cfg.initial(ends)] if cfg.problem != "wave2d" else []
        if cfg.initial_velocity is not None and cfg.problem != "wave2d":
            vals.append(cfg.initial_velocity(ends))
        for v in vals:
            if np.max(np.abs(v)) > 1e-10:
                raise ConfigError("validation", f"{axis}: initial data exceeds 1e-10 on the boundary")
    if cfg.problem == "wave2d":
        (xl, xh), (yl, yh) = cfg.x.bounds, cfg.y.bounds
        xs = np.linspace(xl, xh, 201)
        ys = np.linspace(yl, yh, 201)
        for f in (cfg.initial, cfg.initial_velocity):
            if f is None:
                continue
            edge = np.concatenate(
                (f(xs, np.full_like(xs, yl)), f(xs, np.full_like(xs, yh)), f(np.full_like(ys, xl), ys), f(np.full_like(ys, xh), ys))
            )
            if np.max(np.abs(edge)) > 1e-10:
                raise ConfigError("validation", "initial data exceeds 1e-10 on the boundary")
        ref = cfg.reference
        if ref is not None and ref.kind == "big-domain-2d":
            lo, hi = ref.big_bounds
            if not (lo < min(xl, yl) and hi > max(xh, yh)):
                raise ConfigError("validation", "reference bounds must strictly contain the extended domain")
            tau_ref = ref.tau_ref or cfg.tau
            if tau_ref > cfg.tau:
                raise ConfigError("validation", "reference tau must not exceed the simulation tau")
            radius = cfg.initial.support_radius()
            reach = cfg.speed * max(cfg.snapshot_times) + radius
            if reach >= 0.5 * (hi - lo):
                raise ConfigError("validation", f"wave reaches the reference boundary (c*t + r = {reach:.4g})")
    if cfg.reference is not None and cfg.reference.kind == "dalembert" and cfg.initial_velocity is not None:
        raise ConfigError("validation", "the d'Alembert reference needs zero initial velocity")


def serialize(cfg: SimulationConfig) -> str:
    return cfg.model_dump_json(indent=2)
