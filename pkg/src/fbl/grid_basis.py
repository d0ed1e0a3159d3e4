"""Jacobi polynomials, Jacobi-Gauss-Lobatto grids and Riemann-Liouville
derivatives of the Jacobi basis.

Two independent routes to the fractional derivative of a polynomial live here:

* :func:`rl_jacobi_table` runs the three-term recursions for the left- or
  right-sided Riemann-Liouville derivative of ``p_k^{a,b}`` on ``[-1, 1]``.
* :func:`rl_oracle` applies the fractional power rule term by term to a
  polynomial given in monomial form.  It shares no code with the recursion
  and is what the tests check the recursion against.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.special import gamma, gammaln, poch, rgamma

Side = Literal["left", "right"]

NEWTON_MAXITER = 100
NEWTON_TOL = 1.0e-14
ORACLE_MAX_DEGREE = 30


class ConvergenceError(RuntimeError):
    """Newton iteration for the Lobatto nodes hit its iteration cap."""

    def __init__(self, node: int, step: float) -> None:
        super().__init__(
            f"JGL node {node} did not converge in {NEWTON_MAXITER} iterations "
            f"(last step {step:.3e})"
        )
        self.node = node


def _check_params(a: float, b: float) -> None:
    if a <= -1 or b <= -1:
        raise ValueError(f"Jacobi parameters must exceed -1: got a={a}, b={b}")


# {{{ Jacobi polynomials


def jacobi_poly(n: int, a: float, b: float, x):
    """Evaluate :math:`p_n^{a,b}(x)` by the three-term recurrence.

    Accepts scalars or arrays for *x*; returns a float for scalar input.
    """
    _check_params(a, b)
    if n < 0:
        raise ValueError(f"degree must be non-negative: {n}")
    values = jacobi_vandermonde(n, a, b, np.atleast_1d(np.asarray(x, dtype=float)))
    out = values[:, n]
    return float(out[0]) if np.ndim(x) == 0 else out


def jacobi_vandermonde(nmax: int, a: float, b: float, x: np.ndarray) -> np.ndarray:
    """Return ``V[i, k] = p_k^{a,b}(x_i)`` for ``k = 0..nmax``."""
    _check_params(a, b)
    x = np.asarray(x, dtype=float)
    V = np.empty((x.size, nmax + 1))
    V[:, 0] = 1.0
    if nmax >= 1:
        V[:, 1] = 0.5 * (a + b + 2) * x + 0.5 * (a - b)
    for j in range(1, nmax):
        A, B, C = _abc(j, a, b)
        V[:, j + 1] = (A * x - B) * V[:, j] - C * V[:, j - 1]
    return V


def jacobi_at_endpoint(n: int, a: float, b: float, end: int) -> float:
    """:math:`p_n^{a,b}(\\pm 1)` in closed form."""
    if end > 0:
        return float(poch(n + 1, a) / gamma(a + 1))
    return (-1) ** n * float(poch(n + 1, b) / gamma(b + 1))


def jacobi_norm(k, a: float, b: float):
    r""":math:`\gamma_k^{a,b} = \|p_k^{a,b}\|^2` under the Jacobi weight."""
    k = np.asarray(k, dtype=float)
    out = 2.0 ** (a + b + 1) / (2 * k + a + b + 1) * poch(k + 1, a) / poch(k + b + 1, a)
    return float(out) if np.ndim(out) == 0 else out


def jacobi_mass(a: float, b: float) -> float:
    """Integral of the Jacobi weight over ``[-1, 1]``."""
    return math.exp(
        (a + b + 1) * math.log(2.0) + gammaln(a + 1) + gammaln(b + 1) - gammaln(a + b + 2)
    )


def _abc(j: int, a: float, b: float) -> tuple[float, float, float]:
    s = 2 * j + a + b
    A = (s + 1) * (s + 2) / (2 * (j + 1) * (j + a + b + 1))
    B = (b * b - a * a) * (s + 1) / (2 * (j + 1) * (j + a + b + 1) * s)
    C = (j + a) * (j + b) * (s + 2) / ((j + 1) * (j + a + b + 1) * s)
    return A, B, C


def _abc_hat(j: int, a: float, b: float) -> tuple[float, float, float]:
    s = 2 * j + a + b
    Ah = -2 * (j + a) * (j + b) / ((j + a + b) * s * (s + 1))
    Bh = 2 * (a - b) / (s * (s + 2))
    Ch = 2 * (j + a + b + 1) / ((s + 1) * (s + 2))
    return Ah, Bh, Ch


@dataclass(frozen=True)
class RecursionCoefficients:
    """Three-term and derivative-recurrence coefficients for ``j = 1..n``.

    ``p_{j+1} = (A_j x - B_j) p_j - C_j p_{j-1}`` and
    ``p_j = Ah_j p'_{j-1} + Bh_j p'_j + Ch_j p'_{j+1}``.
    Index 0 is unused and left as NaN.
    """

    a: float
    b: float
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    Ah: np.ndarray
    Bh: np.ndarray
    Ch: np.ndarray


@functools.lru_cache(maxsize=32)
def recursion_coefficients(n: int, a: float, b: float) -> RecursionCoefficients:
    _check_params(a, b)
    if abs(a + b + 1) < 1e-14:
        raise ValueError("a + b = -1 makes the derivative recurrence singular at j = 1")
    arrays = np.full((6, n + 1), np.nan)
    for j in range(1, n + 1):
        arrays[:3, j] = _abc(j, a, b)
        arrays[3:, j] = _abc_hat(j, a, b)
    for arr in arrays:
        arr.flags.writeable = False
    return RecursionCoefficients(a, b, *arrays)


# }}}


# {{{ grids


@dataclass(frozen=True, eq=False)
class CollocationGrid1D:
    """Mapped Jacobi-Gauss-Lobatto grid on ``[x_lo, x_hi]``."""

    x_lo: float
    x_hi: float
    P: int
    a: float
    b: float
    ref_nodes: np.ndarray
    weights: np.ndarray
    nodes: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        nodes = self.to_physical(self.ref_nodes)
        nodes[0], nodes[-1] = self.x_lo, self.x_hi
        nodes.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)

    @property
    def key(self) -> tuple:
        return (self.x_lo, self.x_hi, self.P, self.a, self.b)

    @property
    def half_length(self) -> float:
        return 0.5 * (self.x_hi - self.x_lo)

    @property
    def interior(self) -> np.ndarray:
        return self.nodes[1:-1]

    def to_reference(self, x):
        return 2.0 * (np.asarray(x, dtype=float) - self.x_lo) / (self.x_hi - self.x_lo) - 1.0

    def to_physical(self, xhat):
        return self.x_lo + (np.asarray(xhat, dtype=float) + 1.0) * self.half_length


def _newton_interior_roots(P: int, a: float, b: float) -> np.ndarray:
    """Interior JGL nodes: roots of ``p_{P-1}^{a+1,b+1}``.

    Simultaneous Newton with deflation against the other iterates, started from
    the interior Chebyshev-Gauss-Lobatto points.
    """
    n = P - 1
    aa, bb = a + 1.0, b + 1.0
    x = -np.cos(np.pi * np.arange(1, P) / P)
    step = np.inf
    for _ in range(NEWTON_MAXITER):
        V = jacobi_vandermonde(n, aa, bb, x)
        f = V[:, n]
        df = 0.5 * (n + aa + bb + 1) * jacobi_vandermonde(n - 1, aa + 1, bb + 1, x)[:, n - 1]
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, np.inf)
        deflate = np.sum(1.0 / diff, axis=1)
        dx = f / (df - f * deflate)
        x = x - dx
        step = np.abs(dx)
        if step.max() <= NEWTON_TOL:
            return np.sort(x)
    raise ConvergenceError(int(np.argmax(step)) + 1, float(step.max()))


@functools.lru_cache(maxsize=64)
def jgl_grid(P: int, a: float = 0.0, b: float = 0.0, x_lo: float = -1.0, x_hi: float = 1.0) -> CollocationGrid1D:
    """Jacobi-Gauss-Lobatto grid with ``P + 1`` nodes mapped to ``[x_lo, x_hi]``."""
    _check_params(a, b)
    if P < 2:
        raise ValueError(f"need P >= 2, got {P}")
    if not x_lo < x_hi:
        raise ValueError(f"empty interval [{x_lo}, {x_hi}]")

    xi = _newton_interior_roots(P, a, b)
    if a == b:
        xi = 0.5 * (xi - xi[::-1])

    # all weights share one factor over p_P(x_j)^2; endpoints pick up (b+1), (a+1)
    c = 2.0 ** (a + b + 1) * float(poch(P + 1, a) / (P * poch(b + P + 1, a + 1)))
    wi = c / jacobi_vandermonde(P, a, b, xi)[:, P] ** 2
    w_lo = (b + 1) * c / jacobi_at_endpoint(P, a, b, -1) ** 2
    w_hi = (a + 1) * c / jacobi_at_endpoint(P, a, b, 1) ** 2

    ref = np.concatenate(([-1.0], xi, [1.0]))
    w = np.concatenate(([w_lo], wi, [w_hi]))
    ref.flags.writeable = False
    w.flags.writeable = False
    return CollocationGrid1D(float(x_lo), float(x_hi), int(P), float(a), float(b), ref, w)


def lagrange_coefficients(grid: CollocationGrid1D) -> np.ndarray:
    r"""``L[k, j] = \ell_k^j`` so that ``L_j = \sum_k L[k, j] p_k``."""
    P, a, b = grid.P, grid.a, grid.b
    V = jacobi_vandermonde(P, a, b, grid.ref_nodes)
    k = np.arange(P + 1)
    gam = jacobi_norm(k, a, b)
    if abs(a + b + 1) < 1e-14:
        gam[0] = jacobi_mass(a, b)
    gam[P] *= 2.0 + (a + b + 1) / P
    return (V * grid.weights[:, None]).T / gam[:, None]


def barycentric_weights(x: np.ndarray) -> np.ndarray:
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    # scale to avoid overflow for large P
    diff *= 4.0 / (x[-1] - x[0])
    return 1.0 / np.prod(diff, axis=1)


def lagrange_diff_matrix(grid: CollocationGrid1D) -> np.ndarray:
    """Classical first-derivative collocation matrix on the physical nodes."""
    x = grid.nodes
    w = barycentric_weights(x)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def integration_matrix(grid: CollocationGrid1D) -> np.ndarray:
    r"""``Q[i, j] = \int_{x_lo}^{x_i} L_j(s)\,ds`` exactly for the interpolant."""
    P, a, b = grid.P, grid.a, grid.b
    x = grid.ref_nodes
    V = jacobi_vandermonde(P + 1, a, b, x)
    ends = np.array([jacobi_at_endpoint(k, a, b, -1) for k in range(P + 2)])
    co = recursion_coefficients(P + 1, a, b)
    # antiderivatives of p_k vanishing at -1, from the derivative recurrence
    I = np.empty((x.size, P + 1))
    I[:, 0] = x + 1.0
    for j in range(1, P + 1):
        I[:, j] = (
            co.Ah[j] * (V[:, j - 1] - ends[j - 1])
            + co.Bh[j] * (V[:, j] - ends[j])
            + co.Ch[j] * (V[:, j + 1] - ends[j + 1])
        )
    return grid.half_length * (I @ lagrange_coefficients(grid))


# }}}


# {{{ Riemann-Liouville derivatives of the Jacobi basis


def _recursion(
    x: np.ndarray,
    mu: np.ndarray,
    nmax: int,
    a: float,
    b: float,
    side: Side,
    lower: np.ndarray | None,
) -> np.ndarray:
    """Table ``T[i, k]`` of the side's RL derivative of ``p_k`` at ``x_i``.

    With ``lower is None`` the orders must lie in ``(0, 1]`` and the
    self-contained first-order form of the recursion is used.  Otherwise
    ``mu`` lies in ``(1, 2]`` and ``lower`` holds the order ``mu - 1`` table
    needed for the second derivative of ``x J^{2-mu} p_j``.
    """
    sgn = 1.0 if side == "left" else -1.0
    end = -1 if side == "left" else 1
    dist = x + 1.0 if side == "left" else 1.0 - x
    base0 = dist**-mu * rgamma(1.0 - mu)
    base1 = dist ** (1.0 - mu) * rgamma(2.0 - mu)

    T = np.empty((x.size, nmax + 1))
    T[:, 0] = base0
    if nmax == 0:
        return T
    if side == "left":
        T[:, 1] = 0.5 * (a + b + 2) * base1 - (b + 1) * base0
    else:
        T[:, 1] = -0.5 * (a + b + 2) * base1 + (a + 1) * base0

    co = recursion_coefficients(max(nmax, 1), a, b)
    pend = np.array([jacobi_at_endpoint(k, a, b, end) for k in range(nmax + 1)])
    for j in range(1, nmax):
        A, B, C = co.A[j], co.B[j], co.C[j]
        Ah, Bh, Ch = co.Ah[j], co.Bh[j], co.Ch[j]
        K = Ah * pend[j - 1] + Bh * pend[j] + Ch * pend[j + 1]
        if lower is None:
            denom = 1.0 - mu * A * Ch
            T[:, j + 1] = (
                (A * x - B + mu * A * Bh) * T[:, j]
                + (mu * A * Ah - C) * T[:, j - 1]
                - mu * A * K * base0
            ) / denom
        else:
            nu = 2.0 - mu
            denom = 1.0 + nu * A * Ch
            xJ = x * T[:, j] + sgn * 2.0 * lower[:, j]
            T[:, j + 1] = (
                A * xJ
                - (B + nu * A * Bh) * T[:, j]
                - (C + nu * A * Ah) * T[:, j - 1]
                + nu * A * K * base0
            ) / denom
    return T


def rl_jacobi_table(
    x, alpha, nmax: int, a: float = 0.0, b: float = 0.0, side: Side = "left"
) -> tuple[np.ndarray, np.ndarray | None]:
    """RL derivatives of ``p_0..p_nmax`` at reference points *x*.

    *alpha* is a scalar or one order per point, all in ``(0, 1]`` or all in
    ``(1, 2]``.  Returns the table and, for orders above one, the companion
    order ``alpha - 1`` table it was built from.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    _check_params(a, b)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    mu = np.broadcast_to(np.asarray(alpha, dtype=float), x.shape).copy()
    if np.any((mu <= 0) | (mu > 2)):
        raise ValueError("orders must lie in (0, 2]")
    singular = x <= -1.0 if side == "left" else x >= 1.0
    if np.any(singular) or np.any(np.abs(x) > 1.0):
        raise ValueError(
            f"{side}-sided derivative cannot be evaluated at or beyond its starting endpoint"
        )
    high = mu > 1.0
    if np.all(~high):
        return _recursion(x, mu, nmax, a, b, side, None), None
    if not np.all(high):
        raise ValueError("orders must be all in (0, 1] or all in (1, 2]")
    lower = _recursion(x, mu - 1.0, nmax, a, b, side, None)
    return _recursion(x, mu, nmax, a, b, side, lower), lower


@dataclass(frozen=True, eq=False)
class BasisDerivTable:
    """RL derivatives of the Jacobi basis at the interior nodes of a grid.

    ``values[i, k]`` is the derivative of ``p_k`` of order ``alpha_values[i]``
    at interior reference node ``i + 1``; ``lower`` is the order-minus-one
    companion table (``None`` for orders at or below one).
    """

    side: Side
    alpha_values: np.ndarray
    values: np.ndarray
    lower: np.ndarray | None
    coefficients: RecursionCoefficients


def _table(grid: CollocationGrid1D, alpha_at_nodes, side: Side) -> BasisDerivTable:
    alpha = np.broadcast_to(np.asarray(alpha_at_nodes, dtype=float), (grid.P + 1,))
    xi = grid.ref_nodes[1:-1]
    ai = np.array(alpha[1:-1])
    values, lower = rl_jacobi_table(xi, ai, grid.P, grid.a, grid.b, side)
    if not np.all(np.isfinite(values)):
        raise FloatingPointError("non-finite entry in RL basis table")
    for arr in (ai, values) + ((lower,) if lower is not None else ()):
        arr.flags.writeable = False
    return BasisDerivTable(side, ai, values, lower, recursion_coefficients(grid.P, grid.a, grid.b))


def rl_deriv_basis(grid: CollocationGrid1D, alpha_at_nodes, side: Side) -> BasisDerivTable:
    """Orders in ``(1, 2]`` at every node (scalar broadcasts); interior rows only."""
    alpha = np.asarray(alpha_at_nodes, dtype=float)
    if np.any((alpha <= 1.0) | (alpha > 2.0)):
        raise ValueError("variable orders must lie in (1, 2]")
    return _table(grid, alpha, side)


def rl_deriv_basis_subunit(grid: CollocationGrid1D, order: float, side: Side) -> BasisDerivTable:
    """Same table for a constant order in ``(0, 1]`` (fractional advection)."""
    if not 0.0 < order <= 1.0:
        raise ValueError(f"order must lie in (0, 1], got {order}")
    return _table(grid, order, side)


# }}}


# {{{ power-rule oracle


def rl_oracle(poly_coeffs, alpha: float, x: float, x_start: float | None = None, x_end: float | None = None) -> float:
    """Exact RL derivative of a polynomial by the fractional power rule.

    Give exactly one of *x_start* (left-sided; coefficients of powers of
    ``x - x_start``) or *x_end* (right-sided; powers of ``x_end - x``).

    Coefficients may be floats or :class:`~fractions.Fraction`.  With the
    common factor ``h^-alpha / Gamma(k0 + 1 - alpha)`` pulled out, the
    remaining sum is rational in ``alpha`` and ``h`` and is formed exactly, so
    the alternating terms of high-degree polynomials do not cancel in floating
    point.
    """
    if (x_start is None) == (x_end is None):
        raise ValueError("give exactly one of x_start or x_end")
    coeffs = [Fraction(c) for c in np.ravel(np.asarray(poly_coeffs, dtype=object))]
    if len(coeffs) - 1 > ORACLE_MAX_DEGREE:
        raise ValueError(f"degree {len(coeffs) - 1} exceeds oracle cap {ORACLE_MAX_DEGREE}")
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"order must lie in (0, 2], got {alpha}")
    h = Fraction(x) - Fraction(x_start) if x_start is not None else Fraction(x_end) - Fraction(x)
    if h <= 0:
        raise ValueError("x must lie strictly inside the operator's interval")
    # integer orders annihilate the powers below them
    k0 = int(alpha) if float(alpha).is_integer() else 0
    if k0 >= len(coeffs):
        return 0.0
    a = Fraction(alpha)
    ratio = Fraction(1)
    total = Fraction(0)
    for k in range(k0, len(coeffs)):
        if k > k0:
            ratio *= k / (k - a)
        total += coeffs[k] * ratio * h**k
    return float(total) * math.factorial(k0) * float(rgamma(k0 + 1 - alpha)) * float(h) ** -alpha


def jacobi_shifted_coeffs(n: int, a: float, b: float, side: Side) -> list[Fraction]:
    """Exact monomial coefficients of ``p_n^{a,b}`` in powers of ``x + 1``
    (left) or ``1 - x`` (right), by the ratio recurrence of the hypergeometric
    sum with *a* and *b* taken as exact binary fractions."""
    a, b = Fraction(a), Fraction(b)
    par = a if side == "right" else b
    c = [math.prod((par + j) / j for j in range(1, n + 1)) if n else Fraction(1)]
    for m in range(1, n + 1):
        c.append(c[-1] * (-(n - m + 1) * (a + b + n + m)) / (2 * m * (par + m)))
    if side == "left" and n % 2:
        c = [-v for v in c]
    return c


# }}}
