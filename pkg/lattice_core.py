# \file    lattice_core.py
# \brief   Integer-lattice linear algebra and support-set combinatorics:
#          spans, crops, vertical indices and iota-sequences.

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from functools import reduce
from math import gcd, prod
from typing import Iterable, Sequence, Union

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from errors import DuplicatePoint, NonStabilizing, SchemaError

logger = logging.getLogger(__name__)


class Infinite(enum.Enum):
    INFINITE = "infinite"

    def __repr__(self):
        return "INFINITE"


INFINITE = Infinite.INFINITE

Index = Union[int, Infinite]


@dataclass(frozen=True)
class SupportSet:
    """Finite set of integer points, stored sorted."""
    points: tuple
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise SchemaError("support dimension must be at least 1", dim=self.dim)
        if not self.points:
            raise SchemaError("support set is empty")
        points = []
        for p in self.points:
            p = tuple(int(c) for c in p)
            if len(p) != self.dim:
                raise SchemaError("point has the wrong dimension",
                                  point=list(p), dim=self.dim)
            points.append(p)
        if len(set(points)) != len(points):
            seen = set()
            dup = next(p for p in points if p in seen or seen.add(p))
            raise DuplicatePoint("support set contains a repeated point", point=list(dup))
        object.__setattr__(self, "points", tuple(sorted(points)))

    @classmethod
    def of(cls, points: Iterable[Sequence[int]]) -> "SupportSet":
        points = [tuple(p) for p in points]
        if not points:
            raise SchemaError("support set is empty")
        return cls(tuple(points), len(points[0]))

    @classmethod
    def line(cls, values: Iterable[int]) -> "SupportSet":
        return cls(tuple((int(v),) for v in values), 1)

    @classmethod
    def from_json(cls, data: dict) -> "SupportSet":
        try:
            return cls(tuple(tuple(p) for p in data["points"]), int(data["dim"]))
        except (KeyError, TypeError) as e:
            raise SchemaError(f"malformed support set: {e}") from None

    def to_json(self) -> dict:
        return {"dim": self.dim, "points": [list(p) for p in self.points]}

    @property
    def values(self) -> tuple:
        """Coordinates of a one-dimensional support."""
        return tuple(p[0] for p in self.points)

    def translate(self, shift: Sequence[int]) -> "SupportSet":
        return SupportSet(tuple(tuple(a + b for a, b in zip(p, shift)) for p in self.points),
                          self.dim)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


@dataclass(frozen=True)
class Covector:
    coords: tuple

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        if not any(coords):
            raise SchemaError("covector must be nonzero")
        object.__setattr__(self, "coords", coords)

    @property
    def primitive(self) -> bool:
        return gcd(*self.coords) == 1

    def primitive_part(self) -> "Covector":
        g = gcd(*self.coords)
        return Covector(tuple(c // g for c in self.coords))

    def tail(self, k: int) -> tuple:
        return self.coords[len(self.coords) - k:]

    def __call__(self, point: Sequence[int]) -> int:
        return sum(a * b for a, b in zip(self.coords, point))

    def __neg__(self):
        return Covector(tuple(-c for c in self.coords))


@dataclass(frozen=True)
class IotaSequence:
    values: tuple
    gamma: Covector

    def __post_init__(self):
        if not self.values or self.values[-1] != 1:
            raise SchemaError("an iota-sequence ends with 1", values=list(self.values))
        finite = [v for v in self.values if v is not INFINITE]
        for a, b in zip(finite, finite[1:]):
            if a % b:
                raise SchemaError("iota entries must divide their predecessors",
                                  values=list(finite))

    @property
    def is_finite(self) -> bool:
        return INFINITE not in self.values

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


def _as_values(B) -> tuple:
    if isinstance(B, SupportSet):
        if B.dim != 1:
            raise SchemaError("expected a support in Z^1", dim=B.dim)
        return B.values
    return tuple(int(b) for b in B)


def span_gcd(B) -> int:
    values = _as_values(B)
    b0 = values[0]
    return reduce(gcd, (b - b0 for b in values), 0)


def tuple_span_gcd(Bs) -> int:
    return reduce(gcd, (span_gcd(B) for B in Bs), 0)


def gamma_width(A: SupportSet, gamma: Covector) -> int:
    values = [gamma(a) for a in A]
    return max(values) - min(values)


def crop(A: SupportSet, gamma: Covector, d: int) -> SupportSet:
    top = max(gamma(a) for a in A)
    return SupportSet(tuple(a for a in A if gamma(a) >= top - d), A.dim)


def difference_generators(As: Iterable[SupportSet]) -> list:
    generators = []
    for A in As:
        a0 = A.points[0]
        generators.extend(tuple(x - y for x, y in zip(a, a0)) for a in A.points[1:])
    return generators


def _nonzero_invariants(generators) -> list:
    factors = invariant_factors(Matrix(generators), domain=ZZ)
    return [abs(int(f)) for f in factors if f != 0]


def lattice_index(generators: Sequence[Sequence[int]], n: int) -> Index:
    """Index in Z^n of the lattice spanned by the generators."""
    if n == 0:
        return 1
    generators = [g for g in generators if any(g)]
    if not generators or Matrix(generators).rank() < n:
        return INFINITE
    return prod(_nonzero_invariants(generators))


def saturation_index(generators: Sequence[Sequence[int]]) -> int:
    """Index of a lattice in its saturation inside its rational span."""
    generators = [g for g in generators if any(g)]
    if not generators:
        return 1
    return prod(_nonzero_invariants(generators))


def rational_rank(vectors: Sequence[Sequence]) -> int:
    vectors = [v for v in vectors if any(v)]
    return Matrix(vectors).rank() if vectors else 0


def pivot_axes(vectors: Sequence[Sequence]) -> tuple:
    """Coordinates on which the projection of span(vectors) is injective."""
    vectors = [v for v in vectors if any(v)]
    if not vectors:
        return ()
    return tuple(Matrix(vectors).rref()[1])


def vertical_index(As: Sequence[SupportSet], k: int) -> Index:
    n = As[0].dim - k
    projected = [g[:n] for g in difference_generators(As)]
    return lattice_index(projected, n)


def iota_sequence(As: Sequence[SupportSet], gamma: Covector, k: int) -> IotaSequence:
    bound = max(gamma_width(A, gamma) for A in As)
    values = []
    for d in range(bound + 1):
        index = vertical_index([crop(A, gamma, d) for A in As], k)
        values.append(index)
        if index == 1:
            logger.debug("iota sequence for %s: %s", gamma.coords, values)
            return IotaSequence(tuple(values), gamma)
    raise NonStabilizing("crops never reach vertical index 1",
                         gamma=list(gamma.coords), values=[str(v) for v in values])
