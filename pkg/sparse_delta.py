# \file    sparse_delta.py
# \brief   Delta-invariant of sparse plane curve singularities t -> (f1, f2):
#          closed formula from the j-sequence, the 0-nondegeneracy test and
#          the divided-difference oracle.

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Mapping, Optional, Tuple

import numpy as np

from errors import InvalidSupport, NotInjective, ParityViolation, SchemaError
from exact_poly import SparsePoly, divided_difference, fulton_intersection_number
from lattice_core import INFINITE, Index, SupportSet

logger = logging.getLogger(__name__)

COEFFICIENT_RANGE = 50
MAX_RETRIES = 100


@dataclass(frozen=True)
class DeltaResult:
    delta: int
    milnor: int
    d1: int
    d2: int
    j_sequence: tuple
    branches: int = 1
    rescaled_by: int = 1


@dataclass(frozen=True)
class NondegeneracyCheck:
    nondegenerate: bool
    witness: Optional[int] = None

    def __bool__(self):
        return self.nondegenerate


def _values(B) -> tuple:
    if isinstance(B, SupportSet):
        return B.values
    if isinstance(B, Mapping):
        return tuple(int(b) for b, c in B.items() if c)
    return tuple(int(b) for b in B)


def prepare_supports(B1, B2, rescale: bool = True) -> Tuple[tuple, tuple, int]:
    """Drop 0, check positivity, divide by gcd(B1 u B2) when allowed."""
    sets = []
    for B in (B1, B2):
        values = sorted(set(_values(B)) - {0})
        if not values:
            raise InvalidSupport("support has no positive exponent", support=list(_values(B)))
        if values[0] < 0:
            raise InvalidSupport("germ supports must be nonnegative", support=values)
        sets.append(values)
    m = reduce(gcd, sets[0] + sets[1])
    if m > 1:
        if not rescale:
            raise NotInjective("all exponents share the factor %d" % m, factor=m)
        logger.info("rescaling supports by 1/%d", m)
        sets = [[b // m for b in s] for s in sets]
    return tuple(sets[0]), tuple(sets[1]), m


def j_sequence(B1, B2, rescale: bool = True) -> tuple:
    b1, b2, _ = prepare_supports(B1, B2, rescale)
    return _j_sequence(b1, b2)


def _j_sequence(b1, b2) -> tuple:
    d1, d2 = b1[0], b2[0]
    out, r = [], 0
    while True:
        window = [b for b in b1 if b <= d1 + r] + [b for b in b2 if b <= d2 + r]
        out.append(reduce(gcd, window))
        if out[-1] == 1:
            return tuple(out)
        r += 1


def branch_count(B1, B2) -> int:
    """Branches of the germ after rescaling; the rescaled germ is injective."""
    prepare_supports(B1, B2)
    return 1


def milnor_number(delta: int, branches: int) -> int:
    return 2 * delta - branches + 1


def delta_sparse(B1, B2, rescale: bool = True) -> DeltaResult:
    b1, b2, m = prepare_supports(B1, B2, rescale)
    js = _j_sequence(b1, b2)
    d1, d2 = b1[0], b2[0]
    twice = (d1 - 1) * (d2 - 1) + sum(j - 1 for j in js)
    if twice % 2:
        raise ParityViolation("delta formula gave a half-integer",
                              d1=d1, d2=d2, j_sequence=list(js))
    delta = twice // 2
    r = branch_count(b1, b2)
    return DeltaResult(delta, milnor_number(delta, r), d1, d2, js, r, m)


def _coefficients(f) -> dict:
    return {int(b): Fraction(c) for b, c in dict(f).items() if Fraction(c) and int(b) != 0}


def _rescaled(coeffs: dict, m: int) -> dict:
    return {b // m: c for b, c in coeffs.items()}


def is_zero_nondegenerate(f1, f2) -> NondegeneracyCheck:
    c1, c2 = _coefficients(f1), _coefficients(f2)
    b1, b2, m = prepare_supports(c1, c2)
    c1, c2 = _rescaled(c1, m), _rescaled(c2, m)
    d1, d2 = b1[0], b2[0]
    if not c1.get(d1) or not c2.get(d2):
        raise InvalidSupport("leading coefficients must be nonzero", d1=d1, d2=d2)
    shifts = sorted({b - d1 for b in b1} | {b - d2 for b in b2})
    for k in range(2, gcd(d1, d2) + 1):
        if d1 % k or d2 % k:
            continue
        r = next(s for s in shifts if s % k)
        lhs = c1.get(d1 + r, Fraction(0)) / (c1[d1] * d1)
        rhs = c2.get(d2 + r, Fraction(0)) / (c2[d2] * d2)
        if lhs == rhs:
            logger.debug("0-degenerate at k=%d (r=%d)", k, r)
            return NondegeneracyCheck(False, k)
    return NondegeneracyCheck(True)


def delta_oracle(f1, f2) -> Index:
    """Half the intersection number of the divided differences: that number
    counts the ordered pairs t1 != t2 with f(t1) = f(t2)."""
    F1 = divided_difference(SparsePoly.univariate(_coefficients(f1)))
    F2 = divided_difference(SparsePoly.univariate(_coefficients(f2)))
    number = fulton_intersection_number(F1, F2)
    if number is INFINITE:
        return INFINITE
    if number % 2:
        raise ParityViolation("odd intersection number of divided differences", value=number)
    return number // 2


def sample_coefficients(B, rng: np.random.Generator) -> dict:
    values = rng.integers(1, COEFFICIENT_RANGE + 1, size=len(_values(B)))
    signs = rng.choice([-1, 1], size=len(values))
    return {b: int(v * s) for b, v, s in zip(_values(B), values, signs)}


def sample_nondegenerate_coefficients(B1, B2, rng: np.random.Generator) -> Tuple[dict, dict]:
    for _ in range(MAX_RETRIES):
        f1, f2 = sample_coefficients(B1, rng), sample_coefficients(B2, rng)
        if is_zero_nondegenerate(f1, f2):
            return f1, f2
    raise SchemaError("could not sample 0-nondegenerate coefficients",
                      B1=list(_values(B1)), B2=list(_values(B2)))


def make_degenerate_coefficients(B1, B2, rng: np.random.Generator) -> Optional[Tuple[dict, dict]]:
    """Coefficients violating 0-nondegeneracy for the smallest admissible
    common divisor, or None when the supports leave no room for it."""
    b1, b2, m = prepare_supports(B1, B2)
    d1, d2 = b1[0], b2[0]
    shifts = sorted({b - d1 for b in b1} | {b - d2 for b in b2})
    for k in range(2, gcd(d1, d2) + 1):
        if d1 % k or d2 % k:
            continue
        r = next(s for s in shifts if s % k)
        if d1 + r not in b1 or d2 + r not in b2:
            continue
        f1 = {b * m: c for b, c in sample_coefficients(b1, rng).items()}
        f2 = {b * m: c for b, c in sample_coefficients(b2, rng).items()}
        f2[(d2 + r) * m] = (Fraction(f1[(d1 + r) * m], f1[d1 * m] * d1) * f2[d2 * m] * d2)
        return f1, f2
    return None


def random_support_pair(rng: np.random.Generator, max_size: int = 4,
                        max_exponent: int = 15) -> Tuple[tuple, tuple]:
    """Two positive supports of at most `max_size` exponents with gcd 1."""
    while True:
        sets = []
        for _ in range(2):
            size = int(rng.integers(1, max_size + 1))
            values = rng.choice(np.arange(1, max_exponent + 1), size=size, replace=False)
            sets.append(tuple(sorted(int(v) for v in values)))
        if reduce(gcd, sets[0] + sets[1]) == 1:
            return sets[0], sets[1]
