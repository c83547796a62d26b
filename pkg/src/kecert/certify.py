"""Multiplicity bounds and the no-tiger / Kähler-Einstein verdicts.

A pair (X, D) with D ≡ -K_X is klt once D has no component of coefficient
>= 1, mult_P D <= 1 at smooth points, and mult_Q p_i^*D <= 1 in the orbifold
chart at each singular point. For the Kähler-Einstein criterion the same is
needed for (2+eps)/3 * D, i.e. bounds strictly below 3/2.

Smooth points are covered by separating linear systems (avoid x_v, project
from a vertex P_p with finite fibres) and by splitting off the boundary curve
C_v = X ∩ (x_v = 0). Singular points use the chart pencil |x_j^q_k, x_k^q_j|,
the split D = a C_v + (1 - q_v a) D', and, when that is not enough, the log
canonical threshold of the chart curve of C_v.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .lct import CurveLct, curve_lct
from .quasismooth import BoundaryCurve, QuasiSmoothReport, boundary_curve, check_quasismooth
from .wps import (
    INDICES,
    NonIsolatedSingularities,
    SingularPoint,
    Surface,
    chart_localize,
    chart_multiplicity,
    format_monomial,
    intersection_number,
    line_point_count,
    singular_points,
)

INF = math.inf
ONE = Fraction(1)
KE_LIMIT = Fraction(3, 2)


class InfiniteFiber(ValueError):
    """The projection from a coordinate vertex may have a positive-dimensional fibre."""


class NotAnticanonical(ValueError):
    pass


class ConsistencyError(AssertionError):
    """An internal invariant of the verdict was violated."""


def fmt(x: Fraction | float | int | None) -> str:
    if x is None:
        return "n/a"
    if isinstance(x, float):
        return "inf" if x == INF else repr(x)
    return str(Fraction(x))


@dataclass(frozen=True)
class Trace:
    rule: str
    at: str
    detail: str
    value: Fraction | float | None = None

    def render(self) -> str:
        tail = f": {fmt(self.value)}" if self.value is not None else ""
        return f"{self.rule} at {self.at} {self.detail}{tail}".replace("  ", " ")

    def as_dict(self) -> dict:
        return {"rule": self.rule, "at": self.at, "detail": self.detail, "value": fmt(self.value) if self.value is not None else None}


@dataclass(frozen=True)
class SeparatingStrategy:
    avoid: int
    projection: int
    l: int
    bound: Fraction


@dataclass(frozen=True)
class BoundaryBound:
    v: int
    value: Fraction
    available: bool
    reason: str = ""


@dataclass(frozen=True)
class SmoothCertificate:
    strategies: tuple[SeparatingStrategy, ...]
    boundary: tuple[BoundaryBound, ...]
    leftover: tuple[str, ...]
    leftover_check: bool
    overall: Fraction | None
    candidates: tuple[SeparatingStrategy, ...] = ()
    boundary_candidates: tuple[BoundaryBound, ...] = ()

    @property
    def ok(self) -> bool:
        return self.leftover_check and self.overall is not None


@dataclass(frozen=True)
class RefinedBound:
    v: int
    m: int
    bprime: Fraction
    value: Fraction


@dataclass(frozen=True)
class LctPath:
    v: int
    mode: str
    m: int
    lct: Fraction | None
    bprime: Fraction
    method: str
    passed: bool
    reason: str = ""


@dataclass(frozen=True)
class SingularBound:
    point: SingularPoint
    basic: Fraction | float
    basic_chart: tuple[int, tuple[int, int], int] | None
    refined: RefinedBound | None = None
    lct_path: LctPath | None = None
    derivation: tuple[Trace, ...] = ()

    @property
    def best(self) -> Fraction | float:
        if self.refined is not None and self.refined.value < self.basic:
            return self.refined.value
        return self.basic


@dataclass(frozen=True)
class Verdict:
    tiger_free: str  # "certified" | "tiger-witness" | "unknown"
    ke: str  # "certified" | "inconclusive"
    tiger_witness: str | None = None
    assumptions: tuple[str, ...] = ()
    borderline: tuple[str, ...] = ()
    reasons: tuple[str, ...] = ()


@dataclass(frozen=True)
class CertReport:
    surface: Surface
    quasismooth: QuasiSmoothReport
    applicable: bool
    verdict: Verdict
    singular: tuple[SingularBound, ...] = ()
    smooth: SmoothCertificate | None = None
    curves: tuple[BoundaryCurve, ...] = ()
    trace: tuple[Trace, ...] = field(default=(), compare=False)


# ---------------------------------------------------------------- smooth points


def _two_solutions(a: int, b: int, l: int) -> bool:
    count = 0
    for beta in range(l // b + 1):
        if (l - beta * b) % a == 0:
            count += 1
            if count == 2:
                return True
    return False


def separating_degree(surface: Surface, avoid: int, projection: int) -> int | None:
    """Least l such that each remaining x_i has two monomials x_avoid^a x_i^b of degree l."""
    if avoid == projection:
        raise ValueError("avoid and projection indices must differ")
    if surface.pure_power(projection) is None:
        raise InfiniteFiber(f"no pure power of x{projection}: projection from P{projection} may have an infinite fibre")
    q = surface.ws.q
    others = [i for i in INDICES if i not in (avoid, projection)]
    for l in range(1, surface.ws.pi + 1):
        if all(_two_solutions(q[avoid], q[i], l) for i in others):
            return l
    return None


@lru_cache(maxsize=4096)
def boundary_curves(surface: Surface) -> tuple[BoundaryCurve, ...]:
    return tuple(boundary_curve(surface, v) for v in INDICES)


def boundary_bound(surface: Surface, curve: BoundaryCurve) -> BoundaryBound:
    ws = surface.ws
    v = curve.v
    rest = math.prod(ws.q[i] for i in INDICES if i != v)
    value = max(Fraction(1, ws.q[v]), Fraction(ws.d, rest))
    reasons = []
    if not curve.irreducible.yes:
        reasons.append(f"C{v} irreducible: {curve.irreducible}")
    if not curve.smooth_outside_sing:
        reasons.append(f"C{v} smooth off Sing X: Unknown")
    if ws.d > rest:
        reasons.append(f"d={ws.d} > {rest}")
    return BoundaryBound(v, value, not reasons, "; ".join(reasons))


@dataclass(frozen=True)
class _Stratum:
    zero: frozenset[int]
    bad: str | None  # description of smooth points left in this stratum
    points: tuple[str, ...]
    npoints: int


def _strata(surface: Surface) -> list[_Stratum]:
    ws = surface.ws
    out = []
    for r in range(0, 4):
        for Z in itertools.combinations(INDICES, r):
            F = tuple(i for i in INDICES if i not in Z)
            mons = surface.restricted(F)
            where = "(" + "=".join(f"x{i}" for i in Z) + "=0)" if Z else "the open torus"
            if len(mons) == 1:
                continue
            if not mons:
                if len(F) == 1 and ws.q[F[0]] > 1:
                    out.append(_Stratum(frozenset(Z), None, (f"P{F[0]}",), 1))
                elif len(F) == 1:
                    out.append(_Stratum(frozenset(Z), f"smooth point P{F[0]}", (), 0))
                else:
                    out.append(_Stratum(frozenset(Z), f"X contains the stratum {where}", (), 0))
                continue
            if len(F) == 2:
                g = gcd(ws.q[F[0]], ws.q[F[1]])
                n = line_point_count(ws, mons, F[0], F[1])
                if g > 1:
                    out.append(_Stratum(frozenset(Z), None, (f"{n} point(s) on {where}",), n))
                else:
                    out.append(_Stratum(frozenset(Z), f"{n} smooth point(s) on {where}", (), 0))
            else:
                out.append(_Stratum(frozenset(Z), f"a curve of smooth points in {where}", (), 0))
    return out


def _uncovered(strata: list[_Stratum], avoid: set[int], boundary: set[int]) -> list[_Stratum]:
    """Strata with x_v = 0 for every strategy v and x_w != 0 for every boundary curve w."""
    return [s for s in strata if avoid <= s.zero and not (s.zero & boundary)]


def smooth_point_certificate(surface: Surface) -> SmoothCertificate:
    """Cheapest cover of the smooth locus by separating strategies and boundary splits."""
    ws = surface.ws
    candidates = []
    best: dict[int, SeparatingStrategy] = {}
    for v in INDICES:
        for p in INDICES:
            if p == v or surface.pure_power(p) is None:
                continue
            l = separating_degree(surface, v, p)
            if l is None:
                continue
            s = SeparatingStrategy(v, p, l, intersection_number(ws, l, 1))
            candidates.append(s)
            if v not in best or (s.bound, s.projection) < (best[v].bound, best[v].projection):
                best[v] = s
    curves = boundary_curves(surface)
    bounds = [boundary_bound(surface, c) for c in curves]
    pieces = [("s", v, s.bound) for v, s in best.items()] + [("b", b.v, b.value) for b in bounds if b.available]
    strata = _strata(surface)

    chosen = None
    for r in range(1, len(pieces) + 1):
        for combo in itertools.combinations(pieces, r):
            avoid = {v for kind, v, _ in combo if kind == "s"}
            bnd = {v for kind, v, _ in combo if kind == "b"}
            left = _uncovered(strata, avoid, bnd)
            if any(s.bad for s in left):
                continue
            key = (
                max(val for *_, val in combo),
                len(bnd),
                r,
                sum(s.npoints for s in left),
                tuple(sorted(avoid)),
                tuple(sorted(bnd)),
            )
            if chosen is None or key < chosen[0]:
                chosen = (key, avoid, bnd, left)
    if chosen is None:
        return SmoothCertificate((), (), (), False, None, tuple(candidates), tuple(bounds))
    key, avoid, bnd, left = chosen
    labels = tuple(p for s in left for p in s.points)
    return SmoothCertificate(
        tuple(best[v] for v in sorted(avoid)),
        tuple(b for b in bounds if b.v in bnd),
        labels,
        True,
        key[0],
        tuple(candidates),
        tuple(bounds),
    )


# -------------------------------------------------------------- singular points


def _admissible(surface: Surface, j: int, k: int) -> bool:
    """(x_j = x_k = 0) is not contained in X."""
    return bool(surface.restricted(i for i in INDICES if i not in (j, k)))


def chart_estimate_detail(surface: Surface, point: SingularPoint) -> tuple[Fraction | float, tuple | None, list[Trace]]:
    ws = surface.ws
    q, d = ws.q, ws.d
    best: Fraction | float = INF
    arg = None
    traces = []
    for chart, (j, k), l in point.charts:
        if not _admissible(surface, j, k):
            traces.append(Trace("chart estimate", point.label, f"with pair ({j},{k}) in chart {chart}", None))
            continue
        if point.kind == "coordinate":
            val = Fraction(d, min(q[j], q[k]) * q[l])
        else:
            val = Fraction(point.index * d, min(q[j], q[k]) * q[chart] * q[l])
        traces.append(Trace("chart estimate", point.label, f"with pair ({j},{k}) in chart {chart}", val))
        if val < best:
            best, arg = val, (chart, (j, k), l)
    if arg is None:
        traces.append(Trace("chart estimate", point.label, "no admissible pair", INF))
    return best, arg, traces


def singular_chart_estimate(surface: Surface, point: SingularPoint) -> Fraction | float:
    """Bound on mult_Q p_i^*D from the pencil |x_j^q_k, x_k^q_j| in the best admissible chart.

    At a coordinate point this is d / (min(q_j, q_k) q_l). At a point of a
    singular line (x_a = x_b = 0) with stabilizer g only q_i/g preimages
    share the intersection, giving g d / (min(q_a, q_b) q_c q_e).
    Returns ``math.inf`` if no pair is admissible.
    """
    return chart_estimate_detail(surface, point)[0]


def _curve_chart(surface: Surface, point: SingularPoint, v: int):
    curve = boundary_curves(surface)[v]
    return curve, chart_localize(
        curve.support, point.coordinate, point, surface.ws, drop=(v,), coefficients=surface.coefficients
    )


def _check_split(surface: Surface, point: SingularPoint, v: int) -> BoundaryCurve:
    if point.kind != "coordinate":
        raise ValueError("the boundary split is implemented at coordinate points only")
    if v == point.coordinate:
        raise ValueError(f"x{v} does not vanish at {point.label}")
    curve = boundary_curves(surface)[v]
    if not curve.irreducible.yes:
        raise ValueError(f"C{v} is not known to be irreducible ({curve.irreducible})")
    return curve


def refined_split_bound(surface: Surface, point: SingularPoint, v: int) -> RefinedBound:
    """Split D = a C_v + (1 - q_v a) D' with C_v not in D' and maximise over a in [0, 1/q_v]."""
    _check_split(surface, point, v)
    ws = surface.ws
    _, chart = _curve_chart(surface, point, v)
    m = chart_multiplicity(chart)
    if m == 0:
        raise ValueError(f"C{v} does not pass through {point.label}")
    bprime = Fraction(point.index, m) * intersection_number(ws, ws.q[v], 1)
    return RefinedBound(v, m, bprime, max(Fraction(m, ws.q[v]), bprime))


def lct_path(surface: Surface, point: SingularPoint, v: int, mode: str = "ke") -> LctPath:
    """Log canonical threshold route at a coordinate point through the chart curve of C_v.

    ke: (X, (2+eps)/3 D) klt for small eps needs lct > 2/(3 q_v) and B' < 3/2.
    tiger: (X, D) klt needs lct > 1/q_v and B' <= 1.
    """
    if mode not in ("ke", "tiger"):
        raise ValueError(f"unknown mode {mode!r}")
    _check_split(surface, point, v)
    ws = surface.ws
    _, chart = _curve_chart(surface, point, v)
    m = chart_multiplicity(chart)
    if m == 0:
        raise ValueError(f"C{v} does not pass through {point.label}")
    bprime = Fraction(point.index, m) * intersection_number(ws, ws.q[v], 1)
    res: CurveLct = curve_lct(chart)
    qv = ws.q[v]
    if res.value is None:
        return LctPath(v, mode, m, None, bprime, res.method, False, "threshold undecided")
    if mode == "ke":
        ok_c, ok_b = res.value > Fraction(2, 3 * qv), bprime < KE_LIMIT
        need = f"lct > {fmt(Fraction(2, 3 * qv))} and B' < 3/2"
    else:
        ok_c, ok_b = res.value > Fraction(1, qv), bprime <= ONE
        need = f"lct > {fmt(Fraction(1, qv))} and B' <= 1"
    return LctPath(v, mode, m, res.value, bprime, res.method, ok_c and ok_b, "" if ok_c and ok_b else f"needs {need}")


def tiger_witness(surface: Surface) -> str | None:
    """(x_v = 0) with q_v = 1 through a singular point where its chart curve has multiplicity >= 2."""
    ws = surface.ws
    try:
        points = [p for p in singular_points(surface) if p.kind == "coordinate"]
    except NonIsolatedSingularities:
        return None
    for v in INDICES:
        if ws.q[v] != 1:
            continue
        curve = boundary_curves(surface)[v]
        if not curve.support:
            continue
        for p in points:
            if p.coordinate == v:
                continue
            _, chart = _curve_chart(surface, p, v)
            if chart_multiplicity(chart) >= 2:
                return f"(x{v}=0)"
    return None


# ---------------------------------------------------------------------- verdict


def _singular_bound(surface: Surface, point: SingularPoint) -> SingularBound:
    basic, arg, traces = chart_estimate_detail(surface, point)
    refined = None
    if point.kind == "coordinate":
        for v in INDICES:
            if v == point.coordinate or not boundary_curves(surface)[v].irreducible.yes:
                continue
            try:
                r = refined_split_bound(surface, point, v)
            except ValueError:
                continue
            traces.append(
                Trace("refined split", point.label, f"along (x{v}=0): m={r.m}, B'={fmt(r.bprime)}, bound", r.value)
            )
            if refined is None or r.value < refined.value:
                refined = r
    return SingularBound(point, basic, arg, refined, None, tuple(traces))


def _lct_for_point(surface: Surface, sb: SingularBound) -> SingularBound:
    point = sb.point
    if point.kind != "coordinate":
        return sb
    attempt = None
    traces = list(sb.derivation)
    for v in INDICES:
        if v == point.coordinate or not boundary_curves(surface)[v].irreducible.yes:
            continue
        try:
            path = lct_path(surface, point, v, "ke")
        except ValueError:
            continue
        traces.append(
            Trace(
                "tangent-cone lct",
                point.label,
                f"along (x{v}=0) [{path.method}], B'={fmt(path.bprime)}, {'pass' if path.passed else 'fail'}, lct",
                path.lct,
            )
        )
        if attempt is None or (path.passed and not attempt.passed):
            attempt = path
        if path.passed:
            break
    return SingularBound(point, sb.basic, sb.basic_chart, sb.refined, attempt, tuple(traces))


def _assumptions(surface: Surface, points) -> list[str]:
    out = ["coefficients of all other monomials are nonzero and in general position"]
    if surface.zeroed:
        out.append("zero coefficients: " + ", ".join(format_monomial(m) for m in sorted(surface.zeroed, reverse=True)))
    if surface.explicit:
        out.append("explicit coefficients are treated as nonzero by the quasi-smoothness and cover checks")
    if any(p.kind == "line" for p in points):
        out.append("points on singular lines are counted for distinct roots (generic count)")
    return out


def certify(surface: Surface) -> CertReport:
    ws = surface.ws
    if not ws.anticanonical:
        raise NotAnticanonical(f"{ws}: certification needs d = q0+q1+q2+q3-1 = {sum(ws.q) - 1}")
    qs = check_quasismooth(surface)
    if not qs.passed:
        reason = "quasi-smoothness conditions fail (" + qs.summary() + "); multiplicity criteria inapplicable"
        return CertReport(surface, qs, False, Verdict("unknown", "inconclusive", tiger_witness(surface), reasons=(reason,)))
    try:
        points = singular_points(surface)
    except NonIsolatedSingularities as exc:
        reason = f"non-isolated singularities: {exc}"
        return CertReport(surface, qs, False, Verdict("unknown", "inconclusive", None, reasons=(reason,)))

    trace: list[Trace] = []
    curves = boundary_curves(surface)
    smooth = smooth_point_certificate(surface)
    for s in smooth.strategies:
        trace.append(
            Trace("separating degree", f"x{s.avoid}!=0", f"projecting from P{s.projection} with l={s.l}, bound", s.bound)
        )
    for b in smooth.boundary:
        trace.append(Trace("boundary split", f"(x{b.v}=0)", f"max(1/{ws.q[b.v]}, d/(product of other weights)), bound", b.value))
    if smooth.ok:
        trace.append(Trace("smooth cover", "X", f"leftover {{{', '.join(smooth.leftover) or 'none'}}} all singular, bound", smooth.overall))
    else:
        trace.append(Trace("smooth cover", "X", "no cover of the smooth locus found", None))

    bounds = [_singular_bound(surface, p) for p in points]
    needs_lct = [b.best >= KE_LIMIT for b in bounds]
    bounds = [_lct_for_point(surface, b) if need else b for b, need in zip(bounds, needs_lct)]
    for b in bounds:
        trace.extend(b.derivation)

    reasons: list[str] = []
    borderline: list[str] = []
    overall = smooth.overall
    if smooth.ok:
        if overall == ONE:
            borderline.append("smooth-point bound equals 1 (no-tiger needs < 1)")
        if overall == KE_LIMIT:
            borderline.append("smooth-point bound equals 3/2")
    for b in bounds:
        if b.best == ONE:
            borderline.append(f"{b.point.label}: singular bound equals 1")
        if b.best == KE_LIMIT:
            borderline.append(f"{b.point.label}: singular bound equals 3/2")
        lp = b.lct_path
        if lp and lp.lct is not None and lp.lct == Fraction(2, 3 * ws.q[lp.v]):
            borderline.append(f"{b.point.label}: lct equals 2/(3 q_v)")

    tiger_ok = smooth.ok and overall < ONE and all(b.best <= ONE for b in bounds)
    if not smooth.ok:
        reasons.append("smooth points: no certified cover")
    elif overall >= ONE:
        reasons.append(f"smooth points: bound {fmt(overall)} is not < 1")
    for b in bounds:
        if b.best > ONE:
            reasons.append(f"{b.point.label}: singular bound {fmt(b.best)} > 1")

    ke_ok = tiger_ok
    if not ke_ok:
        smooth_ke = smooth.ok and overall < KE_LIMIT
        sing_ke = []
        for b in bounds:
            ok = b.best < KE_LIMIT or (b.lct_path is not None and b.lct_path.passed)
            sing_ke.append(ok)
            if not ok:
                why = b.lct_path.reason if b.lct_path else "no lct route"
                reasons.append(f"{b.point.label}: bound {fmt(b.best)} not < 3/2 and lct route fails ({why})")
        if smooth.ok and not smooth_ke:
            reasons.append(f"smooth points: bound {fmt(overall)} is not < 3/2")
        ke_ok = smooth_ke and all(sing_ke)

    witness = tiger_witness(surface)
    if tiger_ok and witness:
        raise ConsistencyError(f"{ws}: no-tiger certified but {witness} is a tiger")
    tiger_state = "certified" if tiger_ok else ("tiger-witness" if witness else "unknown")
    ke_state = "certified" if ke_ok else "inconclusive"
    if tiger_state == "certified" and ke_state != "certified":
        raise ConsistencyError("no-tiger certified without KE")
    for b in bounds:
        if b.refined is not None and b.best > b.basic:
            raise ConsistencyError("singular bound exceeds the basic estimate")
    trace.append(Trace("verdict", "X", f"no-tiger {tiger_state}, KE {ke_state}", None))
    verdict = Verdict(
        tiger_state,
        ke_state,
        witness,
        tuple(_assumptions(surface, points)),
        tuple(borderline),
        tuple(reasons) if not (tiger_ok and ke_ok) else (),
    )
    return CertReport(surface, qs, True, verdict, tuple(bounds), smooth, curves, tuple(trace))
