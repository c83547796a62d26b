"""Weighted projective 3-space: weights, monomial bases, singular loci, orbifold charts.

Everything here is exact. Coefficients of a hypersurface are never sampled;
a :class:`Surface` only records which monomials are switched off and which
carry an explicit rational value, every other monomial of the degree-``d``
basis is assumed to have a nonzero coefficient in general position.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, prod
from typing import Iterable, Mapping, Sequence

Monomial = tuple[int, int, int, int]

INDICES = (0, 1, 2, 3)


class WeightError(ValueError):
    """Weights violate the standing assumptions (positivity, pairwise-triple coprimality)."""


class NonIsolatedSingularities(ValueError):
    """A singular line of the ambient space lies inside the surface."""


class ChartError(ValueError):
    pass


@dataclass(frozen=True)
class WeightSystem:
    q: tuple[int, int, int, int]
    d: int

    @property
    def pi(self) -> int:
        return prod(self.q)

    @property
    def anticanonical(self) -> bool:
        return self.d == sum(self.q) - 1

    def degree(self, m: Sequence[int]) -> int:
        return sum(a * w for a, w in zip(m, self.q))

    def __str__(self) -> str:
        return f"X_{self.d} in P({','.join(map(str, self.q))})"


def bad_triples(weights: Sequence[int]) -> list[tuple[int, int, int]]:
    return [t for t in itertools.combinations(weights, 3) if gcd(*t) > 1]


def normalize_weights(raw: Sequence[int], degree: int | None = None) -> WeightSystem:
    """Sort four weights ascending and attach the degree (anticanonical by default).

    >>> normalize_weights((18, 3, 11, 5))
    WeightSystem(q=(3, 5, 11, 18), d=36)
    """
    if len(raw) != 4:
        raise WeightError(f"expected 4 weights, got {len(raw)}")
    if any(int(w) != w or w <= 0 for w in raw):
        raise WeightError(f"weights must be positive integers: {tuple(raw)}")
    q = tuple(sorted(int(w) for w in raw))
    bad = bad_triples(q)
    if bad:
        t = bad[0]
        raise WeightError(f"weights {q}: triple {t} has gcd {gcd(*t)}, any 3 weights must be coprime")
    d = sum(q) - 1 if degree is None else degree
    if d <= 0:
        raise WeightError(f"degree must be positive, got {d}")
    return WeightSystem(q, d)  # type: ignore[arg-type]


def sort_permutation(raw: Sequence[int]) -> tuple[int, ...]:
    """Positions of ``raw`` in ascending order (stable); ``sorted[k] = raw[perm[k]]``."""
    return tuple(sorted(range(len(raw)), key=lambda k: raw[k]))


@lru_cache(maxsize=None)
def _monomials(q: tuple[int, ...], degree: int, support: tuple[int, ...]) -> tuple[Monomial, ...]:
    out: list[Monomial] = []
    free = [i for i in INDICES if i in support]

    def rec(pos: int, left: int, exps: list[int]) -> None:
        if pos == len(free) - 1:
            i = free[pos]
            if left % q[i] == 0:
                exps[i] = left // q[i]
                out.append(tuple(exps))  # type: ignore[arg-type]
                exps[i] = 0
            return
        i = free[pos]
        for a in range(left // q[i], -1, -1):
            exps[i] = a
            rec(pos + 1, left - a * q[i], exps)
        exps[i] = 0

    if not free:
        return ((0, 0, 0, 0),) if degree == 0 else ()
    rec(0, degree, [0, 0, 0, 0])
    out.sort(reverse=True)
    return tuple(out)


def enumerate_monomials(ws: WeightSystem, degree: int, support: Iterable[int] | None = None) -> list[Monomial]:
    """All monomials of weighted ``degree`` in the variables of ``support``.

    Order is lexicographic with x0 > x1 > x2 > x3 (largest exponent vector first).
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    sup = INDICES if support is None else tuple(sorted(set(support)))
    if any(i not in INDICES for i in sup):
        raise ValueError(f"support indices must lie in 0..3: {sup}")
    return list(_monomials(ws.q, degree, sup))


def intersection_number(ws: WeightSystem, a: int, b: int) -> Fraction:
    """Degree of O_X(a).O_X(b) on X_d: a*b*d / (q0 q1 q2 q3)."""
    return Fraction(a * b * ws.d, ws.pi)


def variables(m: Sequence[int]) -> tuple[int, ...]:
    return tuple(i for i, a in enumerate(m) if a)


def uses_only(m: Sequence[int], allowed: Iterable[int]) -> bool:
    allowed = set(allowed)
    return all(a == 0 or i in allowed for i, a in enumerate(m))


def format_monomial(m: Sequence[int], names: Sequence[str] | None = None) -> str:
    names = names or [f"x{i}" for i in range(len(m))]
    parts = [names[i] if a == 1 else f"{names[i]}^{a}" for i, a in enumerate(m) if a]
    return "*".join(parts) if parts else "1"


def parse_monomial(text: str) -> Monomial:
    """Exponent-vector syntax ``a0,a1,a2,a3``."""
    try:
        exps = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise ValueError(f"bad monomial {text!r}: expected four comma-separated integers") from None
    if len(exps) != 4 or any(a < 0 for a in exps):
        raise ValueError(f"bad monomial {text!r}: expected four nonnegative exponents")
    return exps  # type: ignore[return-value]


@dataclass(frozen=True)
class Surface:
    """A member of |O(d)| with generic coefficients, minus ``zeroed`` monomials.

    ``explicit`` pins some coefficients to given nonzero rationals; it exists
    for tangent-cone degenerations at a chart point and is otherwise treated
    as "nonzero" by the combinatorial checks.
    """

    ws: WeightSystem
    zeroed: frozenset[Monomial] = frozenset()
    explicit: tuple[tuple[Monomial, Fraction], ...] = ()

    def __post_init__(self) -> None:
        basis = set(self.basis)
        for m in self.zeroed:
            if m not in basis:
                raise ValueError(f"zeroed monomial {format_monomial(m)} is not of degree {self.ws.d}")
        seen = set()
        for m, c in self.explicit:
            if m not in basis:
                raise ValueError(f"explicit monomial {format_monomial(m)} is not of degree {self.ws.d}")
            if m in self.zeroed or m in seen:
                raise ValueError(f"monomial {format_monomial(m)} given twice")
            if c == 0:
                raise ValueError("explicit coefficients must be nonzero; use zeroed instead")
            seen.add(m)

    @classmethod
    def from_weights(
        cls,
        raw: Sequence[int],
        degree: int | None = None,
        zeroed: Iterable[Sequence[int]] = (),
        explicit: Mapping[Sequence[int], Fraction | int | str] | None = None,
    ) -> Surface:
        """Build from weights in any order; monomials are given in the same order as ``raw``."""
        ws = normalize_weights(raw, degree)
        perm = sort_permutation(raw)

        def remap(m: Sequence[int]) -> Monomial:
            if len(m) != 4:
                raise ValueError(f"monomial needs 4 exponents: {tuple(m)}")
            return tuple(m[perm[k]] for k in range(4))  # type: ignore[return-value]

        z = frozenset(remap(m) for m in zeroed)
        e = tuple(sorted((remap(m), Fraction(c)) for m, c in (explicit or {}).items()))
        return cls(ws, z, e)

    @property
    def generic(self) -> bool:
        return not self.zeroed and not self.explicit

    @cached_property
    def basis(self) -> tuple[Monomial, ...]:
        return _monomials(self.ws.q, self.ws.d, INDICES)

    @cached_property
    def support(self) -> tuple[Monomial, ...]:
        return tuple(m for m in self.basis if m not in self.zeroed)

    @cached_property
    def coefficients(self) -> dict[Monomial, Fraction]:
        return dict(self.explicit)

    def restricted(self, allowed: Iterable[int]) -> list[Monomial]:
        allowed = tuple(allowed)
        return [m for m in self.support if uses_only(m, allowed)]

    def pure_power(self, i: int) -> Monomial | None:
        for m in self.support:
            if variables(m) == (i,):
                return m
        return None

    def describe(self) -> str:
        s = str(self.ws)
        if self.zeroed:
            s += " with zero coefficient on " + ", ".join(format_monomial(m) for m in sorted(self.zeroed, reverse=True))
        if self.explicit:
            s += "; explicit " + ", ".join(f"{format_monomial(m)}={c}" for m, c in self.explicit)
        return s


def coordinate_point_on_surface(surface: Surface, i: int) -> bool:
    """P_i lies on X iff the equation has no pure power of x_i."""
    return surface.pure_power(i) is None


@dataclass(frozen=True)
class SingularPoint:
    """A coordinate point P_i, or the ``count`` points of X on the line x_a = x_b = 0."""

    kind: str  # "coordinate" | "line"
    index: int
    coordinate: int | None = None
    vanishing: tuple[int, int] | None = None
    count: int = 1
    charts: tuple[tuple[int, tuple[int, int], int], ...] = field(default=(), compare=False)

    @property
    def label(self) -> str:
        if self.kind == "coordinate":
            return f"P{self.coordinate}"
        a, b = self.vanishing  # type: ignore[misc]
        return f"L{a}{b}"

    def describe(self) -> str:
        if self.kind == "coordinate":
            return f"P{self.coordinate} (index {self.index})"
        a, b = self.vanishing  # type: ignore[misc]
        return f"{self.count} point{'s' if self.count != 1 else ''} on (x{a}=x{b}=0) (index {self.index}, generic count)"

    def zero_coordinates(self) -> tuple[int, ...]:
        if self.kind == "coordinate":
            return tuple(j for j in INDICES if j != self.coordinate)
        return self.vanishing  # type: ignore[return-value]


def coordinate_singular_point(ws: WeightSystem, i: int) -> SingularPoint:
    rest = [j for j in INDICES if j != i]
    charts = tuple(
        (i, (j, k), next(x for x in rest if x not in (j, k))) for j, k in itertools.combinations(rest, 2)
    )
    return SingularPoint("coordinate", ws.q[i], coordinate=i, charts=charts)


def line_point_count(ws: WeightSystem, restricted: Sequence[Monomial], c: int, e: int) -> int:
    """Torus roots on the line with free coordinates x_c, x_e, for generic coefficients.

    Exponents of x_c in degree-d monomials of x_c, x_e move in steps of q_e/g;
    the restricted equation is a polynomial of degree (max - min)/step in the
    invariant ratio, with distinct roots when coefficients are general.
    """
    if not restricted:
        return 0
    g = gcd(ws.q[c], ws.q[e])
    step = ws.q[e] // g
    exps = [m[c] for m in restricted]
    return (max(exps) - min(exps)) // step


def singular_points(surface: Surface) -> list[SingularPoint]:
    ws = surface.ws
    out: list[SingularPoint] = []
    for i in INDICES:
        if ws.q[i] > 1 and coordinate_point_on_surface(surface, i):
            out.append(coordinate_singular_point(ws, i))
    for c, e in itertools.combinations(INDICES, 2):
        g = gcd(ws.q[c], ws.q[e])
        if g == 1:
            continue
        a, b = (j for j in INDICES if j not in (c, e))
        restricted = surface.restricted((c, e))
        if not restricted:
            raise NonIsolatedSingularities(
                f"{ws}: the singular line (x{a}=x{b}=0) of index {g} lies inside X"
            )
        n = line_point_count(ws, restricted, c, e)
        if n:
            charts = ((c, (a, b), e), (e, (a, b), c))
            out.append(SingularPoint("line", g, vanishing=(a, b), count=n, charts=charts))
    return out


@dataclass(frozen=True)
class ChartSupport:
    """Support of a polynomial in an orbifold chart, centred at the chart point.

    ``terms`` pairs exponent tuples in ``coords`` with a coefficient: ``None``
    for a generic nonzero coefficient, otherwise an explicit rational.
    ``residues`` are the weights of ``coords`` modulo the chart group order,
    i.e. the exponents of the root of unity acting on each coordinate.
    """

    chart: int
    coords: tuple[int, ...]
    terms: tuple[tuple[tuple[int, ...], Fraction | None], ...]
    group_order: int
    stabilizer: int
    residues: tuple[int, ...]

    @property
    def points(self) -> tuple[tuple[int, ...], ...]:
        return tuple(e for e, _ in self.terms)

    @property
    def generic(self) -> bool:
        return all(c is None for _, c in self.terms)


def chart_localize(
    support: Iterable[Monomial],
    chart: int,
    point: SingularPoint,
    ws: WeightSystem,
    *,
    drop: Iterable[int] = (),
    coefficients: Mapping[Monomial, Fraction] | None = None,
) -> ChartSupport:
    """Restrict to the chart x_chart = 1 and move ``point`` to the origin.

    At a coordinate point the chart variable is simply set to 1. At a line
    point only the two transverse coordinates (the vanishing pair) are kept;
    the remaining free coordinate does not vanish there and is absorbed into
    the coefficients. Coordinates in ``drop`` (e.g. the variable cutting out
    a boundary curve) are removed.
    """
    coefficients = coefficients or {}
    drop = set(drop)
    if point.kind == "coordinate":
        if chart != point.coordinate:
            raise ChartError(f"x{chart} vanishes at {point.label}; use chart {point.coordinate}")
        coords = tuple(j for j in INDICES if j != chart and j not in drop)
        stabilizer = ws.q[chart]
    else:
        a, b = point.vanishing  # type: ignore[misc]
        if chart in (a, b):
            raise ChartError(f"x{chart} vanishes on the line (x{a}=x{b}=0)")
        coords = tuple(j for j in (a, b) if j not in drop)
        stabilizer = point.index
    terms: dict[tuple[int, ...], Fraction | None] = {}
    for m in support:
        e = tuple(m[j] for j in coords)
        if point.kind == "line" and not any(m[j] for j in point.vanishing):  # type: ignore[union-attr]
            # the pure free-coordinate part vanishes at the point to first order
            continue
        if e in terms or point.kind == "line":
            terms[e] = None
        else:
            terms[e] = coefficients.get(m)
    n = ws.q[chart]
    return ChartSupport(
        chart=chart,
        coords=coords,
        terms=tuple(sorted(terms.items(), key=lambda t: t[0], reverse=True)),
        group_order=n,
        stabilizer=stabilizer,
        residues=tuple(ws.q[j] % n for j in coords),
    )


def chart_multiplicity(chart: ChartSupport) -> int:
    """Multiplicity at the origin for coefficients without cancellation: lowest total degree."""
    if not chart.terms:
        raise ChartError("empty chart support")
    return min(sum(e) for e in chart.points)
