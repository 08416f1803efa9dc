# \file    exact_poly.py
# \brief   Exact polynomial arithmetic: divided differences, Sylvester
#          resultants, local intersection numbers at the origin and
#          linear algebra over cyclotomic fields.

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import lcm
from typing import Dict, Mapping, Sequence, Union

from sympy import Poly, QQ, Rational, symbols
from sympy.polys.specialpolys import cyclotomic_poly
from sympy.polys.subresultants_qq_zz import sylvester

from errors import InvalidSupport, SchemaError
from lattice_core import INFINITE, Index

logger = logging.getLogger(__name__)

T, T1, T2, ZETA = symbols("t t1 t2 zeta")


def _rational(value) -> Rational:
    value = Fraction(value)
    return Rational(value.numerator, value.denominator)


def _fraction(value) -> Fraction:
    value = Rational(value)
    return Fraction(int(value.p), int(value.q))


@dataclass(frozen=True)
class SparsePoly:
    """Polynomial stored as {exponent vector: nonzero rational}."""
    terms: Mapping
    nvars: int

    def __post_init__(self):
        terms: Dict[tuple, Fraction] = {}
        for exponent, c in dict(self.terms).items():
            exponent = (exponent,) if isinstance(exponent, int) else tuple(exponent)
            if len(exponent) != self.nvars:
                raise SchemaError("exponent vector has the wrong length",
                                  exponent=list(exponent), nvars=self.nvars)
            c = Fraction(c)
            if c:
                terms[exponent] = terms.get(exponent, Fraction(0)) + c
        object.__setattr__(self, "terms", {e: c for e, c in terms.items() if c})

    @classmethod
    def univariate(cls, coefficients: Mapping[int, object]) -> "SparsePoly":
        return cls({(int(b),): c for b, c in coefficients.items()}, 1)

    @classmethod
    def from_poly(cls, poly: Poly) -> "SparsePoly":
        return cls({m: _fraction(c) for m, c in poly.terms()}, len(poly.gens))

    def to_poly(self, *gens) -> Poly:
        if not gens:
            gens = (T,) if self.nvars == 1 else (T1, T2)[:self.nvars]
        if len(gens) != self.nvars:
            raise SchemaError("generator count does not match nvars", nvars=self.nvars)
        if not self.terms:
            return Poly(0, *gens, domain=QQ)
        return Poly.from_dict({e: _rational(c) for e, c in self.terms.items()}, *gens, domain=QQ)

    @property
    def support(self) -> tuple:
        return tuple(sorted(self.terms))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)


def divided_difference(f: SparsePoly) -> SparsePoly:
    """(f(t2) - f(t1)) / (t2 - t1) as a polynomial in (t1, t2)."""
    if f.nvars != 1:
        raise SchemaError("divided differences are taken of univariate polynomials")
    terms: Dict[tuple, Fraction] = {}
    for (b,), c in f.terms.items():
        if b < 0:
            raise InvalidSupport("negative exponent in a plain polynomial", exponent=b)
        for p in range(b):
            key = (p, b - 1 - p)
            terms[key] = terms.get(key, Fraction(0)) + c
    return SparsePoly(terms, 2)


def _bivariate(F) -> Poly:
    if isinstance(F, Poly):
        return Poly(F.as_expr(), T1, T2, domain=QQ)
    return F.to_poly(T1, T2)


def _low_order(p: Poly) -> int:
    return min(m[0] for m in p.monoms())


def fulton_intersection_number(F, G) -> Index:
    """Intersection multiplicity at the origin of F = 0 and G = 0."""
    f, g = _bivariate(F), _bivariate(G)
    if f.is_zero or g.is_zero:
        raise InvalidSupport("intersection number of the zero polynomial")
    common = f.gcd(g)
    if common.total_degree() > 0:
        if common.coeff_monomial(1) == 0:
            return INFINITE
        f, g = f.exquo(common), g.exquo(common)
    t2 = Poly(T2, T1, T2, domain=QQ)
    total = 0
    while True:
        if f.coeff_monomial(1) != 0 or g.coeff_monomial(1) != 0:
            return total
        fr, gr = f.eval(T2, 0), g.eval(T2, 0)
        if fr.is_zero and gr.is_zero:
            return INFINITE
        if fr.is_zero:
            total += _low_order(gr)
            f = f.exquo(t2)
            continue
        if gr.is_zero:
            total += _low_order(fr)
            g = g.exquo(t2)
            continue
        if fr.degree() > gr.degree():
            f, g, fr, gr = g, f, gr, fr
        shift = Poly(T1 ** (gr.degree() - fr.degree()), T1, T2, domain=QQ)
        g = g * fr.LC() - f * shift * gr.LC()
        if g.is_zero:
            return INFINITE


def sylvester_resultant(f, g, variable=T):
    """Determinant of the Sylvester matrix, rows of f first."""
    if isinstance(f, SparsePoly):
        f = f.to_poly(variable).as_expr()
    if isinstance(g, SparsePoly):
        g = g.to_poly(variable).as_expr()
    f = f.as_expr() if isinstance(f, Poly) else f
    g = g.as_expr() if isinstance(g, Poly) else g
    if Poly(f, variable).degree() < 1 or Poly(g, variable).degree() < 1:
        raise InvalidSupport("resultant needs positive degrees in the eliminated variable")
    return sylvester(f, g, variable, 1).det().expand()


@lru_cache(maxsize=None)
def cyclotomic_modulus(order: int) -> Poly:
    return Poly(cyclotomic_poly(order, ZETA), ZETA, domain=QQ)


def root_of_unity(order: int, exponent: int) -> "CyclotomicElement":
    return CyclotomicElement.root_power(order, exponent)


@dataclass(frozen=True)
class CyclotomicElement:
    """Element of Q(zeta_N), reduced modulo the N-th cyclotomic polynomial."""
    order: int
    rep: Poly

    def __post_init__(self):
        if self.order < 1:
            raise SchemaError("cyclotomic order must be positive", order=self.order)
        rep = Poly(self.rep.as_expr(), ZETA, domain=QQ).rem(cyclotomic_modulus(self.order))
        object.__setattr__(self, "rep", rep)

    @classmethod
    def root_power(cls, order: int, exponent: int) -> "CyclotomicElement":
        return cls(order, Poly(ZETA ** (exponent % order), ZETA, domain=QQ))

    @classmethod
    def rational(cls, order: int, value) -> "CyclotomicElement":
        return cls(order, Poly(_rational(value), ZETA, domain=QQ))

    def promote(self, order: int) -> "CyclotomicElement":
        if order == self.order:
            return self
        if order % self.order:
            raise SchemaError("can only promote to a multiple of the order",
                              order=self.order, target=order)
        step = order // self.order
        return CyclotomicElement(order, Poly(self.rep.as_expr().subs(ZETA, ZETA ** step),
                                             ZETA, domain=QQ))

    def _coerce(self, other) -> "CyclotomicElement":
        if isinstance(other, CyclotomicElement):
            if other.order != self.order:
                raise SchemaError("mixed cyclotomic orders; promote first",
                                  orders=[self.order, other.order])
            return other
        return CyclotomicElement.rational(self.order, other)

    def __add__(self, other):
        return CyclotomicElement(self.order, self.rep + self._coerce(other).rep)

    __radd__ = __add__

    def __sub__(self, other):
        return CyclotomicElement(self.order, self.rep - self._coerce(other).rep)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        return CyclotomicElement(self.order, self.rep * self._coerce(other).rep)

    __rmul__ = __mul__

    def __neg__(self):
        return CyclotomicElement(self.order, -self.rep)

    def inverse(self) -> "CyclotomicElement":
        if not self:
            raise ZeroDivisionError("zero has no inverse in Q(zeta)")
        return CyclotomicElement(self.order, self.rep.invert(cyclotomic_modulus(self.order)))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __bool__(self):
        return not self.rep.is_zero

    def __eq__(self, other):
        if isinstance(other, CyclotomicElement) and other.order != self.order:
            m = lcm(self.order, other.order)
            return self.promote(m).rep == other.promote(m).rep
        try:
            return self.rep == self._coerce(other).rep
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.order, self.rep))


def cyclotomic_rank(M: Sequence[Sequence[CyclotomicElement]]) -> int:
    """Rank over Q(zeta_N) by Gaussian elimination with exact inverses."""
    rows = [list(r) for r in M]
    if not rows or not rows[0]:
        return 0
    order = reduce(lcm, (e.order for r in rows for e in r), 1)
    rows = [[e.promote(order) for e in r] for r in rows]
    rank, ncols = 0, len(rows[0])
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = rows[rank][col].inverse()
        for i in range(rank + 1, len(rows)):
            if rows[i][col]:
                factor = rows[i][col] * inv
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank
