"""Holistic finite difference models of u_t = A u + eps B u built on a centre manifold."""

from holistic_fd.coefficients import CoeffSeries, extract_coefficients, nu1_closed_form, shanks
from holistic_fd.construct import (
    basis_polynomials,
    construct_iterative,
    even_model,
    odd_correction,
    residual_check,
)
from holistic_fd.equivalent import DiffOpSeries, consistency_order, equivalent_pde
from holistic_fd.model import FieldExpansion, ModelSeries
from holistic_fd.pde import ADVECTION_DIFFUSION, DIFFUSION, PdeSpec, parse_pde
from holistic_fd.simulate import integrate, point_release_moments, stability_max_growth
from holistic_fd.stencil import OperatorSeries, Stencil, derivative_to_series, grid_operator

__version__ = "0.1.0"

__all__ = [
    "ADVECTION_DIFFUSION",
    "DIFFUSION",
    "CoeffSeries",
    "DiffOpSeries",
    "FieldExpansion",
    "ModelSeries",
    "OperatorSeries",
    "PdeSpec",
    "Stencil",
    "basis_polynomials",
    "consistency_order",
    "construct_iterative",
    "derivative_to_series",
    "equivalent_pde",
    "even_model",
    "extract_coefficients",
    "grid_operator",
    "integrate",
    "nu1_closed_form",
    "odd_correction",
    "parse_pde",
    "point_release_moments",
    "residual_check",
    "shanks",
    "stability_max_growth",
]
