"""Exact certification of Kähler-Einstein metrics and tigers on quasi-smooth X_d in weighted P^3."""

from __future__ import annotations

from .certify import CertReport, ConsistencyError, Verdict, certify, separating_degree, singular_chart_estimate
from .lct import curve_lct, newton_lct
from .quasismooth import boundary_curve, check_quasismooth, curve_irreducible
from .search import SearchResult, enumerate_weight_systems, load, persist, run_batch
from .wps import Surface, WeightError, WeightSystem, enumerate_monomials, intersection_number, normalize_weights

__all__ = [
    "CertReport",
    "ConsistencyError",
    "SearchResult",
    "Surface",
    "Verdict",
    "WeightError",
    "WeightSystem",
    "boundary_curve",
    "certify",
    "check_quasismooth",
    "curve_irreducible",
    "curve_lct",
    "enumerate_monomials",
    "enumerate_weight_systems",
    "intersection_number",
    "load",
    "newton_lct",
    "normalize_weights",
    "persist",
    "run_batch",
    "separating_degree",
    "singular_chart_estimate",
]
