"""Quasi-smoothness of the general member, and the boundary curves X ∩ (x_v = 0)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

import sympy as sp

from . import symbolic
from .wps import INDICES, Monomial, Surface, WeightSystem, format_monomial, uses_only, variables


@dataclass(frozen=True)
class ConditionResult:
    passed: bool
    witnesses: tuple[tuple[tuple[int, ...], tuple[Monomial, ...]], ...]
    failures: tuple[tuple[int, ...], ...]

    def describe(self) -> str:
        parts = []
        for key, mons in self.witnesses:
            parts.append(f"{key}: " + " & ".join(format_monomial(m) for m in mons))
        for key in self.failures:
            parts.append(f"{key}: none")
        return "; ".join(parts)


@dataclass(frozen=True)
class QuasiSmoothReport:
    cond_i: ConditionResult
    cond_ii: ConditionResult
    cond_iii: ConditionResult

    @property
    def passed(self) -> bool:
        return self.cond_i.passed and self.cond_ii.passed and self.cond_iii.passed

    def summary(self) -> str:
        return "".join("Y" if c.passed else "N" for c in (self.cond_i, self.cond_ii, self.cond_iii))


def _is_times_var(m: Monomial, base: Sequence[int], extra: int) -> bool:
    """m = (monomial in the ``base`` variables) * x_extra."""
    return m[extra] == 1 and all(a == 0 for i, a in enumerate(m) if i not in base and i != extra)


def _binary(support: Sequence[Monomial], i: int, j: int) -> Monomial | None:
    for m in support:
        if uses_only(m, (i, j)):
            return m
    return None


def check_quasismooth(surface: Surface) -> QuasiSmoothReport:
    support = surface.support

    wit, fail = [], []
    for i in INDICES:
        found = None
        for m in support:
            if variables(m) == (i,) or any(j != i and _is_times_var(m, (i,), j) for j in INDICES):
                found = m
                break
        if found is None:
            fail.append((i,))
        else:
            wit.append(((i,), (found,)))
    cond_i = ConditionResult(not fail, tuple(wit), tuple(fail))

    wit, fail = [], []
    for i, j in itertools.combinations(INDICES, 2):
        m = _binary(support, i, j)
        if m is not None:
            wit.append(((i, j), (m,)))
            continue
        k, l = (x for x in INDICES if x not in (i, j))
        mk = next((m for m in support if _is_times_var(m, (i, j), k)), None)
        ml = next((m for m in support if _is_times_var(m, (i, j), l)), None)
        if mk is not None and ml is not None:
            wit.append(((i, j), (mk, ml)))
        else:
            fail.append((i, j))
    cond_ii = ConditionResult(not fail, tuple(wit), tuple(fail))

    wit, fail = [], []
    q = surface.ws.q
    for i, j in itertools.combinations(INDICES, 2):
        if gcd(q[i], q[j]) == 1:
            continue
        m = _binary(support, i, j)
        if m is None:
            fail.append((i, j))
        else:
            wit.append(((i, j), (m,)))
    cond_iii = ConditionResult(not fail, tuple(wit), tuple(fail))
    return QuasiSmoothReport(cond_i, cond_ii, cond_iii)


@dataclass(frozen=True)
class Irreducibility:
    status: str  # "yes" | "no" | "unknown"
    components: int | None = None
    reason: str = ""

    @property
    def yes(self) -> bool:
        return self.status == "yes"

    def __str__(self) -> str:
        if self.status == "no":
            return f"No({self.components})"
        return self.status.capitalize()


def _rank(vectors: Sequence[Sequence[int]]) -> int:
    rows = [[Fraction(x) for x in v] for v in vectors if any(v)]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _gcd_all(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return g


def _sub(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(x - y for x, y in zip(a, b))


def _hull_2d(points: list[tuple[int, int]]) -> list[int]:
    """Indices of convex hull vertices in counter-clockwise order (collinear points dropped)."""
    order = sorted(range(len(points)), key=lambda k: points[k])

    def cross(o: int, a: int, b: int) -> int:
        (ox, oy), (ax, ay), (bx, by) = points[o], points[a], points[b]
        return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)

    lower: list[int] = []
    for k in order:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], k) <= 0:
            lower.pop()
        lower.append(k)
    upper: list[int] = []
    for k in reversed(order):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], k) <= 0:
            upper.pop()
        upper.append(k)
    return lower[:-1] + upper[:-1]


def polygon_decomposable(points: Sequence[Sequence[int]]) -> bool:
    """Integral Minkowski decomposability of the lattice polygon spanned by ``points``.

    The polygon must be two-dimensional. It decomposes iff a proper nonempty
    sub-multiset of its primitive edge vectors sums to zero.
    """
    base = points[0]
    diffs = [_sub(p, base) for p in points]
    basis = [v for v in diffs if any(v)]
    u = basis[0]
    w = next(v for v in basis if _rank([u, v]) == 2)
    n = len(u)
    s, t = next((s, t) for s in range(n) for t in range(n) if u[s] * w[t] - u[t] * w[s] != 0)
    proj = [(p[s], p[t]) for p in points]
    hull = _hull_2d(proj)
    edges = []
    for a, b in zip(hull, hull[1:] + hull[:1]):
        e = _sub(points[b], points[a])
        g = _gcd_all(e)
        edges.append((tuple(x // g for x in e), g))
    zero = tuple(0 for _ in range(n))
    # state: partial sum -> set of (took_something, left_something)
    states: dict[tuple[int, ...], set[tuple[bool, bool]]] = {zero: {(False, False)}}
    for vec, length in edges:
        nxt: dict[tuple[int, ...], set[tuple[bool, bool]]] = {}
        for total, flags in states.items():
            for k in range(length + 1):
                new = tuple(a + k * b for a, b in zip(total, vec))
                for took, left in flags:
                    nxt.setdefault(new, set()).add((took or k > 0, left or k < length))
        states = nxt
    return (True, True) in states.get(zero, set())


def curve_irreducible(
    support: Sequence[Monomial], coefficients: Mapping[Monomial, Fraction] | None = None
) -> Irreducibility:
    """Irreducibility of the general member with the given monomial support.

    Write f = x^c * g with c the componentwise minimum of the support. If the
    support spans a plane (affine rank 2), the monomial map has 2-dimensional
    image and Bertini makes g irreducible. If it lies on a line with primitive
    step delta, g is a binary form in x^delta+ and x^delta- whose k linear
    factors are irreducible binomials. Explicit coefficients replace Bertini
    by Gao's polygon indecomposability test and an exact root count.
    """
    if not support:
        raise ValueError("empty support")
    coefficients = coefficients or {}
    n = len(support[0])
    c = tuple(min(m[i] for m in support) for i in range(n))
    fixed = [i for i in range(n) if c[i] > 0]
    reduced = [_sub(m, c) for m in support]
    diffs = [_sub(m, reduced[0]) for m in reduced]
    rank = _rank(diffs)
    explicit = any(m in coefficients for m in support)

    if rank == 0:
        m = support[0]
        vs = variables(m)
        if len(vs) == 1 and m[vs[0]] == 1:
            return Irreducibility("yes", 1, "a coordinate line")
        if all(m[i] == 1 for i in vs) and len(vs) > 1:
            return Irreducibility("no", len(vs), "union of coordinate lines")
        return Irreducibility("unknown", None, "non-reduced monomial curve")

    if rank == 1:
        direction = next(v for v in diffs if any(v))
        g = _gcd_all(direction)
        delta = tuple(x // g for x in direction)
        pivot = next(i for i in range(n) if delta[i])
        ts = [v[pivot] // delta[pivot] for v in diffs]
        k = max(ts) - min(ts)
        if explicit:
            syms: list[sp.Symbol] = []
            by_t = dict(zip(ts, support))
            coeffs = []
            for t in range(min(ts), max(ts) + 1):
                m = by_t.get(t)
                if m is None:
                    coeffs.append(sp.Integer(0))
                elif m in coefficients:
                    val = coefficients[m]
                    coeffs.append(sp.Rational(val.numerator, val.denominator))
                else:
                    s = symbolic.coefficient_symbol(m)
                    syms.append(s)
                    coeffs.append(s)
            _, distinct = symbolic.distinct_root_count(coeffs, syms)
            if distinct < k:
                return Irreducibility("unknown", None, "binary form with a repeated factor")
        comps = k + len(fixed)
        if comps == 1:
            return Irreducibility("yes", 1, "irreducible binomial")
        return Irreducibility("no", comps, f"pencil of degree {k}" + (f" plus {len(fixed)} fixed line(s)" if fixed else ""))

    if explicit and polygon_decomposable(reduced):
        return Irreducibility("unknown", None, "explicit coefficients on a decomposable Newton polygon")
    if fixed:
        return Irreducibility("no", 1 + len(fixed), "fixed coordinate component")
    return Irreducibility("yes", 1, "indecomposable Newton polygon" if explicit else "not composed with a pencil")


def curve_smooth_outside_sing(
    ws: WeightSystem,
    v: int,
    support: Sequence[Monomial],
    coefficients: Mapping[Monomial, Fraction] | None = None,
) -> bool | None:
    """True if the general curve X ∩ (x_v=0) is smooth at every point with trivial stabilizer.

    Points with nontrivial stabilizer are singular points of X and are
    skipped. The check runs over coordinate tori. If the equation restricted
    to a torus keeps a generic term, Bertini applies. If it vanishes there,
    enough generic linear terms x_I^M * x_e must exist. Tori carried only
    by explicit coefficients are decided by elimination. Returns None
    (unknown) otherwise; never asserts singularity.
    """
    if not support:
        return None
    coefficients = coefficients or {}
    free = [i for i in INDICES if i != v]
    if len(support) == 1 and any(a > 1 for a in support[0]):
        return None
    for r in range(1, 4):
        for I in itertools.combinations(free, r):
            if gcd(*(ws.q[i] for i in I)) > 1:
                continue
            own = [m for m in support if uses_only(m, I)]
            if own:
                if any(m not in coefficients for m in own):
                    continue
            else:
                others = [e for e in free if e not in I]
                linear = [[m for m in support if _is_times_var(m, I, e)] for e in others]
                if sum(any(m not in coefficients for m in ms) for ms in linear) >= len(I):
                    continue
                if not any(m in coefficients for ms in linear for m in ms):
                    return None
            if not _torus_smooth(free, I, support, coefficients):
                return None
    return True


def _torus_smooth(free, I, support, coefficients) -> bool:
    # only terms of order <= 1 in the vanishing coordinates matter on this torus
    near = [m for m in support if sum(a for i, a in enumerate(m) if i not in I) <= 1]
    gens = [sp.Symbol(f"x{i}") for i in INDICES]
    y = sp.Symbol("_y")
    f, syms = symbolic.generic_polynomial(near, gens, coefficients)
    zero = {gens[i]: 0 for i in free if i not in I}
    eqs = [sp.expand(p.subs(zero)) for p in [f, *(sp.diff(f, gens[i]) for i in free)]]
    eqs.append(y * sp.Mul(*(gens[i] for i in I)) - 1)
    return symbolic.has_no_common_zero(eqs, [gens[i] for i in I] + [y], syms)


@dataclass(frozen=True)
class BoundaryCurve:
    v: int
    support: tuple[Monomial, ...]
    irreducible: Irreducibility
    smooth_outside_sing: bool | None
    degree_class: int

    def describe(self) -> str:
        smooth = "Yes" if self.smooth_outside_sing else "Unknown"
        return (
            f"C{self.v} = X∩(x{self.v}=0) in |O({self.degree_class})|: "
            f"{{{', '.join(format_monomial(m) for m in self.support)}}}, "
            f"irreducible {self.irreducible}, smooth off Sing X {smooth}"
        )


def boundary_curve(surface: Surface, v: int) -> BoundaryCurve:
    free = [i for i in INDICES if i != v]
    support = tuple(surface.restricted(free))
    coeffs = surface.coefficients
    if not support:
        irr = Irreducibility("unknown", None, "curve is the whole plane section")
        smooth = None
    else:
        irr = curve_irreducible(support, coeffs)
        smooth = curve_smooth_outside_sing(surface.ws, v, support, coeffs)
    return BoundaryCurve(v, support, irr, smooth, surface.ws.q[v])
