"""Log canonical thresholds of plane curve germs from their Newton polygons.

For a germ that is nondegenerate with respect to its Newton polygon the
threshold is min(1, 1/t) where (t, t) is the point where the diagonal meets
the polygon boundary. Generic coefficients are always nondegenerate. With
explicit coefficients a degenerate double-line tangent cone is straightened
by a linear shear before reading the polygon.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import sympy as sp

from . import symbolic
from .wps import ChartSupport, chart_multiplicity


def diagonal_hit(points: Iterable[Sequence[int]]) -> Fraction:
    """Smallest t with (t, t) in conv(points) + R^2_{>=0}."""
    pts = [(Fraction(a), Fraction(b)) for a, b in points]
    if not pts:
        raise ValueError("empty support")
    best = min(max(a, b) for a, b in pts)
    for (a1, b1), (a2, b2) in itertools.combinations(pts, 2):
        u, w = a1 - b1, a2 - b2
        if u * w < 0:
            lam = u / (u - w)
            best = min(best, a1 + lam * (a2 - a1))
    return best


def newton_lct(support: ChartSupport | Iterable[Sequence[int]]) -> Fraction:
    """min(1, sup{c : (1/c, 1/c) lies in the Newton polyhedron}).

    >>> newton_lct([(5, 0), (0, 3)])
    Fraction(8, 15)
    """
    points = support.points if isinstance(support, ChartSupport) else list(support)
    t = diagonal_hit(points)
    if t == 0:
        return Fraction(1)
    return min(Fraction(1), 1 / t)


def newton_vertices(points: Iterable[Sequence[int]]) -> list[tuple[int, int]]:
    """Vertices of the Newton polyhedron, ordered by increasing first exponent."""
    pts = sorted(set((int(a), int(b)) for a, b in points))
    lower: list[tuple[int, int]] = []
    for p in pts:
        if lower and p[1] >= lower[-1][1]:
            continue
        while len(lower) >= 2:
            (ox, oy), (ax, ay) = lower[-2], lower[-1]
            if (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox) <= 0:
                lower.pop()
            else:
                break
        lower.append(p)
    return lower


@dataclass(frozen=True)
class CurveLct:
    value: Fraction | None  # None: undecided
    method: str
    support: tuple[tuple[int, ...], ...]  # support the threshold was read from


def _coefficient_table(chart: ChartSupport, gens) -> tuple[sp.Poly, list[sp.Symbol]]:
    key = {e: e for e in chart.points}
    coeffs = {e: c for e, c in chart.terms if c is not None}
    expr, syms = symbolic.generic_polynomial(chart.points, gens, coeffs, key)
    return sp.Poly(expr, *gens, domain=symbolic.field_of(syms)), syms


def _nondegenerate(poly: sp.Poly, syms) -> bool:
    terms = dict(poly.terms())
    verts = newton_vertices(terms)
    for (a1, b1), (a2, b2) in zip(verts, verts[1:]):
        g = gcd(a2 - a1, b1 - b2)
        p, r = (a2 - a1) // g, (b1 - b2) // g
        face = [terms.get((a1 + k * p, b1 - k * r), 0) for k in range(g + 1)]
        face = [poly.domain.to_sympy(c) if c != 0 else sp.Integer(0) for c in face]
        deg, distinct = symbolic.distinct_root_count(face, syms)
        if distinct < deg:
            return False
    return True


def curve_lct(chart: ChartSupport) -> CurveLct:
    """Log canonical threshold at the origin of the chart curve."""
    if len(chart.coords) != 2:
        raise ValueError("curve germs need exactly two chart coordinates")
    pts = tuple(tuple(e) for e in chart.points)
    m = chart_multiplicity(chart)
    if m == 0:
        return CurveLct(Fraction(1), "origin not on the curve", pts)
    if m == 1:
        return CurveLct(Fraction(1), "smooth branch", pts)
    if chart.generic:
        low = {e for e in pts if sum(e) == 2}
        if m == 2 and ((1, 1) in low or {(2, 0), (0, 2)} <= low):
            return CurveLct(Fraction(1), "node: two distinct tangents", pts)
        return CurveLct(newton_lct(pts), "Newton polygon", pts)

    y1, y2 = sp.symbols("_y1 _y2")
    poly, syms = _coefficient_table(chart, (y1, y2))
    if _nondegenerate(poly, syms):
        tag = "node: two distinct tangents" if m == 2 and newton_lct(pts) == 1 else "Newton polygon (explicit, nondegenerate)"
        return CurveLct(newton_lct(pts), tag, pts)
    if m != 2:
        return CurveLct(None, f"degenerate multiplicity-{m} germ with explicit coefficients", pts)

    dom = poly.domain
    coeff = {e: dom.to_sympy(c) for e, c in poly.terms()}
    A, B, C = (coeff.get(e, sp.Integer(0)) for e in ((2, 0), (1, 1), (0, 2)))
    if sp.simplify(B**2 - 4 * A * C) != 0 or C == 0:
        return CurveLct(None, "degenerate tangent cone that is not a double line", pts)
    s = sp.simplify(B / (2 * C))
    sheared = sp.Poly(sp.expand(poly.as_expr().subs(y2, y2 - s * y1)), y1, y2, domain=dom)
    if not _nondegenerate(sheared, syms):
        return CurveLct(None, "still degenerate after straightening the double tangent", pts)
    new_pts = tuple(sorted((e for e, c in sheared.terms() if c != 0), reverse=True))
    return CurveLct(newton_lct(new_pts), f"double tangent straightened by y2 -> y2 - ({s})*y1, then Newton polygon", new_pts)
