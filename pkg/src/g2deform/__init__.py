"""Calibration algebra on R^7 and discrete associative-deformation analysis on the flat torus."""

from .exterior import AltForm, FormError, basis_form, eval_form, hodge, interior, volume_form, wedge
from .g2core import (
    G2Structure,
    chi,
    chi_via_cross,
    chi_via_star,
    cross,
    metric_from_phi,
    metric_matrix,
    mu0,
    phi0,
    psi,
    two_form_action,
)
from .octonion import Octonion, cross_from_oct, oct_mul_array

__version__ = "0.1.0"

__all__ = [
    "AltForm", "FormError", "basis_form", "eval_form", "hodge", "interior", "volume_form", "wedge",
    "G2Structure", "chi", "chi_via_cross", "chi_via_star", "cross", "metric_from_phi", "metric_matrix",
    "mu0", "phi0", "psi", "two_form_action",
    "Octonion", "cross_from_oct", "oct_mul_array",
]
