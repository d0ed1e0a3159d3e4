"""Time integrators: Crank-Nicolson for the 1D linear systems and two-step
Adams-Bashforth with a forward-Euler first step for the 2D system."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, TypeVar

import numpy as np
import scipy.linalg as sla

S = TypeVar("S")


class SingularSystemError(ArithmeticError):
    def __init__(self, pivot: int) -> None:
        super().__init__(f"Crank-Nicolson matrix is singular: zero pivot at index {pivot}")
        self.pivot = pivot


@dataclass(frozen=True, eq=False)
class CNOperator:
    """``(I - tau/2 A)^{-1} (I + tau/2 A)`` held as an LU factorization."""

    A: np.ndarray
    tau: float
    lu: tuple = field(init=False, repr=False)
    explicit: np.ndarray = field(init=False, repr=False)
    residual: float = field(init=False)

    def __post_init__(self) -> None:
        A = np.asarray(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"system matrix must be square, got shape {A.shape}")
        if not self.tau > 0.0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        n = A.shape[0]
        implicit = np.eye(n) - 0.5 * self.tau * A
        with warnings.catch_warnings():
            # a zero pivot is reported below as SingularSystemError
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu, piv = sla.lu_factor(implicit, check_finite=True)
        diag = np.abs(np.diag(lu))
        if np.any(diag == 0.0):
            raise SingularSystemError(int(np.argmin(diag)))

        # residual of the factorization, relative to the size of A
        L = np.tril(lu, -1) + np.eye(n)
        U = np.triu(lu)
        perm = np.arange(n)
        for i, p in enumerate(piv):
            perm[i], perm[p] = perm[p], perm[i]
        res = np.abs(implicit[perm] - L @ U).max()
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "lu", (lu, piv))
        object.__setattr__(self, "explicit", np.eye(n) + 0.5 * self.tau * A)
        object.__setattr__(self, "residual", float(res))

    @property
    def size(self) -> int:
        return self.A.shape[0]


def cn_step(op: CNOperator, u_n: np.ndarray) -> np.ndarray:
    u_n = np.asarray(u_n, dtype=float)
    if u_n.shape[0] != op.size:
        raise ValueError(f"state length {u_n.shape[0]} does not match operator size {op.size}")
    return sla.lu_solve(op.lu, op.explicit @ u_n, check_finite=False)


def ab2_step(rhs: Callable[[S], S], current: S, previous: S | None, tau: float) -> S:
    """One Adams-Bashforth step ``s + tau * rhs(1.5 s - 0.5 s_prev)``.

    *rhs* is linear, so it is applied once to the extrapolated state.  With no
    previous state the step is forward Euler.  States may be arrays or tuples
    of arrays.
    """
    if previous is None:
        return _axpy(current, tau, rhs(current))
    return _axpy(current, tau, rhs(_lincomb(1.5, current, -0.5, previous)))


def _axpy(s, a, r):
    if isinstance(s, tuple):
        return tuple(si + a * ri for si, ri in zip(s, r))
    return s + a * r


def _lincomb(a, s, b, t):
    if isinstance(s, tuple):
        return tuple(a * si + b * ti for si, ti in zip(s, t))
    return a * s + b * t


def march_ab2(rhs: Callable[[S], S], s0: S, tau: float, nsteps: int, observe=None) -> S:
    """Advance *nsteps* AB2 steps; ``observe(n, state)`` sees every state from n=0."""
    prev, cur = None, s0
    if observe is not None:
        observe(0, cur)
    for n in range(1, nsteps + 1):
        prev, cur = cur, ab2_step(rhs, cur, prev, tau)
        if observe is not None:
            observe(n, cur)
    return cur
