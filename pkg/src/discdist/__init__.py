"""Distance from real homogeneous polynomials to the real discriminant
under the Bombieri norm."""

from ._accel import backend_name
from .algebra import (
    HomogeneousPoly,
    bombieri_dot,
    bombieri_norm,
    compose_orthogonal,
    normalized,
    pow_linear_form,
    random_orthogonal,
)
from .classify import classify, contact_polynomial, contact_radius, find_quasi_singular
from .distance import SearchConfig, delta, distance_bombieri
from .maximizer import OptimizeConfig, ascent_direction, certificate, run
from .polyio import format_poly, parse_poly, read_poly, write_poly

__version__ = "0.1.0"

__all__ = [
    "HomogeneousPoly",
    "OptimizeConfig",
    "SearchConfig",
    "ascent_direction",
    "backend_name",
    "bombieri_dot",
    "bombieri_norm",
    "certificate",
    "classify",
    "compose_orthogonal",
    "contact_polynomial",
    "contact_radius",
    "delta",
    "distance_bombieri",
    "find_quasi_singular",
    "format_poly",
    "normalized",
    "parse_poly",
    "pow_linear_form",
    "random_orthogonal",
    "read_poly",
    "run",
    "write_poly",
]
