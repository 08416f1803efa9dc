# \file    resultant_strata.py
# \brief   Components of the singular locus of the sparse resultant of two
#          univariate polynomials: which strata exist, their degrees,
#          transversal singularity types and delta-invariants.

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from errors import ExceptionalCase, InconsistencyDetected, NegativeNodeCount
from lattice_core import SupportSet, span_gcd, tuple_span_gcd
from sparse_delta import delta_sparse

logger = logging.getLogger(__name__)


def length(B) -> int:
    """L(B) = max B - min B."""
    values = _values(B)
    return max(values) - min(values)


def _values(B) -> tuple:
    if isinstance(B, SupportSet):
        return B.values
    return tuple(sorted(set(int(b) for b in B)))


def _minkowski(*Bs) -> tuple:
    out = {0}
    for B in Bs:
        out = {a + b for a in out for b in _values(B)}
    return tuple(sorted(out))


@dataclass(frozen=True)
class SingularityType:
    kind: str                  # "ordinary" or "sparse"
    points: int = 0            # m for an ordinary m-point
    supports: tuple = ()       # (B1', B2') for a sparse singularity
    delta: int = 0

    @classmethod
    def ordinary(cls, m: int) -> "SingularityType":
        return cls("ordinary", points=m, delta=m * (m - 1) // 2)

    @classmethod
    def sparse(cls, B1, B2) -> "SingularityType":
        return cls("sparse", supports=(tuple(B1), tuple(B2)), delta=delta_sparse(B1, B2).delta)

    def describe(self) -> str:
        if self.kind == "ordinary":
            return f"ordinary {self.points}-point"
        return f"sparse{self.supports}"


@dataclass(frozen=True)
class StratumReport:
    name: str
    exists: bool
    condition: str
    degree: Optional[int]
    transversal_type: Optional[SingularityType]
    delta: int
    components: int = 1
    m: Optional[int] = None
    parts: tuple = ()
    members: tuple = ()
    closed_form_degree: Optional[Fraction] = None
    source: str = "table"  # or "closed_form", "closed_form/m", "node_budget"


@dataclass(frozen=True)
class Normalization:
    shifts: Tuple[int, int]
    divisor: int


@dataclass(frozen=True)
class MDecomposition:
    which: int
    m: int
    parts: Tuple[tuple, tuple]


def normalize_supports(B1, B2) -> Tuple[tuple, tuple, Normalization]:
    b1, b2 = _values(B1), _values(B2)
    shifted = [tuple(b - b1[0] for b in b1), tuple(b - b2[0] for b in b2)]
    divisor = tuple_span_gcd(shifted)
    if divisor > 1:
        shifted = [tuple(b // divisor for b in s) for s in shifted]
    else:
        divisor = 1
    return shifted[0], shifted[1], Normalization((b1[0], b2[0]), divisor)


def check_exceptional(B1, B2) -> None:
    b1, b2 = _values(B1), _values(B2)
    if len(b1) < 2 or len(b2) < 2:
        raise ExceptionalCase("a support is a single point", case="singleton")
    if tuple_span_gcd([b1, b2]) > 1:
        raise ExceptionalCase("supports are not normalized", case="common span")
    if length(b1) == 1 and length(b2) == 1:
        raise ExceptionalCase("both supports are unit segments", case="determinantal")


def find_m_decompositions(B1, B2) -> List[MDecomposition]:
    sets = (_values(B1), _values(B2))
    found = {}
    for m in range(2, length(sets[0]) + length(sets[1]) + 1):
        for i in (1, 2):
            own, other = sets[i - 1], sets[2 - i]
            if len(own) <= 2 or span_gcd(other) % m:
                continue
            classes = {}
            for b in own:
                classes.setdefault(b % m, []).append(b)
            if len(classes) != 2:
                continue
            parts = tuple(tuple(c) for c in sorted(classes.values()))
            if tuple_span_gcd([parts[0], parts[1], other]) != m:
                continue
            if m in found:
                raise InconsistencyDetected(
                    "two ways to decompose for the same m", m=m,
                    first=[found[m].which, [list(p) for p in found[m].parts]],
                    second=[i, [list(p) for p in parts]])
            found[m] = MDecomposition(i, m, parts)
    return [found[m] for m in sorted(found)]


def node_budget(B1, B2) -> int:
    """Total delta of a generic curve with Newton triangle of size L(B1)+L(B2)."""
    size = length(B1) + length(B2)
    return (size - 1) * (size - 2) // 2


def supports_at_zero(b1, b2) -> tuple:
    return [b - b1[0] for b in b1], [b - b2[0] for b in b2]


def supports_at_infinity(b1, b2) -> tuple:
    return [b1[-1] - b for b in b1], [b2[-1] - b for b in b2]


def _closed_form_s1_degree(b1, b2) -> Fraction:
    low = delta_sparse(*supports_at_zero(b1, b2)).delta
    high = delta_sparse(*supports_at_infinity(b1, b2)).delta
    size = length(b1) + length(b2)
    return Fraction((size - 1) ** 2 - low - high + 1, 2)


def strata_report(B1, B2) -> List[StratumReport]:
    b1, b2 = _values(B1), _values(B2)
    check_exceptional(b1, b2)
    sets = (b1, b2)
    reports: List[StratumReport] = []

    decompositions = find_m_decompositions(b1, b2)
    for dec in decompositions:
        other = sets[2 - dec.which]
        closed = length(_minkowski(dec.parts[0], dec.parts[1], other))
        degree = Fraction(closed, dec.m)
        if degree.denominator != 1:
            raise InconsistencyDetected("S_m degree is not integral", m=dec.m, closed=closed)
        if closed != degree:
            logger.warning("S_%d: closed form %d counts each %d-point %d times; "
                           "reporting %d", dec.m, closed, dec.m, dec.m, degree)
        reports.append(StratumReport(
            f"S_{dec.m}", True, f"B{dec.which} splits mod {dec.m}", int(degree),
            SingularityType.ordinary(dec.m), dec.m * (dec.m - 1) // 2,
            m=dec.m, parts=tuple(tuple(p) for p in dec.parts), closed_form_degree=Fraction(closed),
            source="closed_form" if closed == degree else "closed_form/m"))

    if not any(1 + s[0] in s for s in sets):
        kind = SingularityType.sparse(*supports_at_zero(b1, b2))
        reports.append(StratumReport("S0", True, "1 + min B_i not in B_i", 1, kind, kind.delta))

    if not any(s[-1] - 1 in s for s in sets):
        kind = SingularityType.sparse(*supports_at_infinity(b1, b2))
        reports.append(StratumReport("Sinf", True, "max B_i - 1 not in B_i", 1, kind, kind.delta))

    for i in (1, 2):
        own, other = sets[i - 1], sets[2 - i]
        if len(own) == 2 and length(other) > 1:
            kind = SingularityType.ordinary(length(other))
            reports.append(StratumReport(f"T{i}", True, f"|B{i}| = 2", 1, kind, kind.delta))

    if b1 == b2 and len(b1) == 3:
        kind = SingularityType.ordinary(length(b1))
        reports.append(StratumReport("T0", True, "B1 = B2 + const, three points", 3,
                                     kind, kind.delta))
        return reports

    members = []
    ms = [dec.m for dec in decompositions]
    for i in (1, 2):
        if len(sets[2 - i]) <= 2:
            continue
        k = span_gcd(sets[i - 1])
        blocked = [k // m for m in ms if k % m == 0]
        members += [f"S_{i}^{j}" for j in range(1, k // 2 + 1)
                    if not any(j % q == 0 for q in blocked)]
    if len(b1) > 2 and len(b2) > 2:
        members.append("S")
    if members:
        degree = node_budget(b1, b2) - sum(r.degree * r.delta for r in reports)
        if degree < 0:
            raise NegativeNodeCount("strata use more than the node budget",
                                    budget=node_budget(b1, b2), nodes=degree)
        closed = _closed_form_s1_degree(b1, b2)
        if closed != degree:
            logger.warning("S1: closed form gives %s, node budget gives %d", closed, degree)
        reports.append(StratumReport(
            "S1", True, "remaining nodes", degree, SingularityType.ordinary(2), 1,
            components=len(members), members=tuple(members), closed_form_degree=closed,
            source="closed_form" if closed == degree else "node_budget"))
    return reports


def swap_report(reports: List[StratumReport]) -> List[tuple]:
    """(name, degree, type) triples with the roles of B1 and B2 exchanged."""
    rename = {"T1": "T2", "T2": "T1"}
    return sorted((rename.get(r.name, r.name), r.degree,
                   r.transversal_type.describe() if r.transversal_type else None)
                  for r in reports)


def negate_supports(B1, B2) -> Tuple[tuple, tuple]:
    n1, n2, _ = normalize_supports([-b for b in _values(B1)], [-b for b in _values(B2)])
    return n1, n2
