"""Intersective polynomials over quadratic rings of integers, and finite-window
recurrence experiments for the actions they drive."""

__version__ = "0.1.0"

from .number_field import AlgInt, FieldDesc, parse_element, parse_field
from .ideal_arith import Ideal, factor_rational_prime, parse_ideal, residue_system
from .poly_ring import OPoly, decompose, parse_poly, poly_gcd_over_L, recompose
from .intersectivity import (
    DepthRule,
    Status,
    Verdict,
    certify_quadratic_plus_constant,
    certify_three_quadratics,
    is_intersective_up_to,
    jointly_intersective_up_to,
    lift_roots,
    roots_mod,
)

__all__ = [
    "AlgInt", "FieldDesc", "parse_element", "parse_field",
    "Ideal", "factor_rational_prime", "parse_ideal", "residue_system",
    "OPoly", "decompose", "parse_poly", "poly_gcd_over_L", "recompose",
    "DepthRule", "Status", "Verdict", "certify_quadratic_plus_constant",
    "certify_three_quadratics", "is_intersective_up_to", "jointly_intersective_up_to",
    "lift_roots", "roots_mod",
]
