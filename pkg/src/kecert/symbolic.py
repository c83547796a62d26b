"""Generic members as sympy polynomials.

A generic coefficient is a fresh symbol; computations run over the fraction
field QQ(symbols), which is exactly "the general member" of the family.
Only the explicit-coefficient branches and the test oracles use this.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import sympy as sp


def coefficient_symbol(m: Sequence[int]) -> sp.Symbol:
    return sp.Symbol("c_" + "_".join(map(str, m)))


def generic_polynomial(
    support: Iterable[Sequence[int]],
    gens: Sequence[sp.Symbol],
    coefficients: Mapping[tuple[int, ...], Fraction | None] | None = None,
    key: Mapping[tuple[int, ...], tuple[int, ...]] | None = None,
) -> tuple[sp.Expr, list[sp.Symbol]]:
    """Sum of monomials over ``gens``; a monomial's coefficient is explicit if given, else a symbol.

    ``key`` maps an exponent tuple to the label used for its symbol (so that
    chart terms keep the name of the ambient monomial they came from).
    """
    coefficients = coefficients or {}
    expr = sp.Integer(0)
    syms: list[sp.Symbol] = []
    for e in support:
        e = tuple(e)
        c = coefficients.get(e)
        if c is None:
            s = coefficient_symbol((key or {}).get(e, e))
            syms.append(s)
            coeff: sp.Expr = s
        else:
            coeff = sp.Rational(c.numerator, c.denominator)
        expr += coeff * sp.Mul(*(g**a for g, a in zip(gens, e)))
    return expr, syms


def field_of(syms: Sequence[sp.Symbol]):
    return sp.QQ.frac_field(*syms) if syms else sp.QQ


def has_no_common_zero(polys: Sequence[sp.Expr], gens: Sequence[sp.Symbol], syms: Sequence[sp.Symbol]) -> bool:
    """True when the system has no solution over the algebraic closure of QQ(syms)."""
    polys = [p for p in (sp.expand(p) for p in polys) if p != 0]
    if not polys:
        return False
    G = sp.groebner(polys, *gens, order="grevlex", domain=field_of(syms))
    return list(G.exprs) == [1]


def distinct_root_count(coeffs: Sequence[sp.Expr], syms: Sequence[sp.Symbol]) -> tuple[int, int]:
    """(degree, number of distinct roots) of sum coeffs[k] z^k over QQ(syms)-bar."""
    z = sp.Symbol("_z")
    p = sp.Poly(sum(c * z**k for k, c in enumerate(coeffs)), z, domain=field_of(syms))
    if p.is_zero:
        return 0, 0
    return p.degree(), p.sqf_part().degree()
