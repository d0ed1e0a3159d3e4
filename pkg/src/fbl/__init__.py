"""Fractional buffer layers for wave propagation on bounded domains.

Variable-order Riemann-Liouville operators, discretized by Jacobi spectral
collocation, turn the equation from advection in the interior into diffusion
inside attached buffer layers so outgoing waves are absorbed.  PML baselines
and reference solutions are included for comparison.
"""

__version__ = "0.1.0"

from .frac_ops import FracDiffMatrices, build_matrices_1d, build_matrices_2d
from .grid_basis import CollocationGrid1D, jacobi_poly, jgl_grid, rl_deriv_basis, rl_oracle
from .vorder import Layer, VariableOrderProfile, eval_profile, validate_profile

__all__ = [
    "CollocationGrid1D",
    "FracDiffMatrices",
    "Layer",
    "VariableOrderProfile",
    "build_matrices_1d",
    "build_matrices_2d",
    "eval_profile",
    "jacobi_poly",
    "jgl_grid",
    "rl_deriv_basis",
    "rl_oracle",
    "validate_profile",
]
