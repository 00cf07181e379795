"""Exact lifting regions and unique-lifting tests for maximal lattice-free
simplicial polytopes."""
from .errors import CapExceededError, HypothesisViolated, LiftError, ValidationError
from .lifting import build_region, classify_body, torus_volume_exact
from .polytope import body_from_json, body_to_json, maximality_report, simplex_from_vertices

__all__ = [
    "CapExceededError",
    "HypothesisViolated",
    "LiftError",
    "ValidationError",
    "body_from_json",
    "body_to_json",
    "build_region",
    "classify_body",
    "maximality_report",
    "simplex_from_vertices",
    "torus_volume_exact",
]
