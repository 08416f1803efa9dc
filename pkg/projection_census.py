# \file    projection_census.py
# \brief   Singularities of the closure of the projection (x, y1, y2) -> (y1, y2)
#          of a generic sparse spatial curve: counts per singularity type,
#          ordinary double points by subtraction from the total delta, and the
#          Newton polygon of the image curve.

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from errors import InconsistencyDetected, NegativeNodeCount, SchemaError
from lattice_core import SupportSet
from polytope_geom import (LatticePolytope, convex_hull, euclidean_volume, mixed_fiber_polygon,
                           mixed_volume)
from resultant_strata import (SingularityType, check_exceptional, find_m_decompositions, length,
                              normalize_supports, strata_report, supports_at_infinity,
                              supports_at_zero)
from ultratrop import ConventionDecision, thsum_terms, thsum_total
from ultratrop import plane_curve_supports  # noqa: F401

logger = logging.getLogger(__name__)

STANDARD_TRIANGLE = ((0, 0), (1, 0), (0, 1))

Fibers = Dict[int, SupportSet]


@dataclass(frozen=True)
class CensusEntry:
    kind: SingularityType
    count: int
    delta_each: int
    clause: int
    stratum: str

    def to_json(self) -> dict:
        return {"kind": self.kind.describe(), "count": self.count,
                "delta_each": self.delta_each, "clause": self.clause, "stratum": self.stratum}


@dataclass(frozen=True)
class SingularityCensus:
    entries: tuple
    nodes: int
    total_delta: int
    newton_polygon: LatticePolytope
    g_convention: Optional[ConventionDecision] = None

    def count(self, stratum: str) -> int:
        if stratum == "S1":
            return self.nodes
        return sum(e.count for e in self.entries if e.stratum == stratum)


def project_supports(A1: SupportSet, A2: SupportSet) -> Tuple[tuple, tuple, Tuple[Fibers, Fibers]]:
    """Images B_i under the first coordinate and the fibers over each b,
    dropped to the (x2, x3)-plane."""
    out = []
    for A in (A1, A2):
        if A.dim != 3:
            raise SchemaError("projection census works with supports in Z^3", dim=A.dim)
        fibers: Dict[int, list] = {}
        for a in A:
            fibers.setdefault(a[0], []).append(a[1:])
        out.append({b: SupportSet(tuple(pts), 2) for b, pts in sorted(fibers.items())})
    return tuple(out[0]), tuple(out[1]), (out[0], out[1])


def _hull(A: SupportSet) -> LatticePolytope:
    return convex_hull(A.points, A.dim)


def _union(fibers: Fibers, values) -> SupportSet:
    return SupportSet(tuple((b,) + p for b in values for p in fibers[b]), 3)


def _mv2(P: SupportSet, Q: SupportSet) -> int:
    return mixed_volume([_hull(P), _hull(Q)])


def _original(values, shift: int, divisor: int) -> tuple:
    return tuple(shift + divisor * v for v in values)


def _clause_decompositions(A, fibers, n1, n2, norm) -> List[CensusEntry]:
    entries = []
    for dec in find_m_decompositions(n1, n2):
        j = dec.which
        shift = norm.shifts[j - 1]
        parts = [_union(fibers[j - 1], _original(p, shift, norm.divisor)) for p in dec.parts]
        volume = mixed_volume([_hull(A[2 - j]), _hull(parts[0]), _hull(parts[1])])
        if volume % dec.m:
            raise InconsistencyDetected("m-point count is not integral",
                                        m=dec.m, mixed_volume=volume)
        logger.warning("clause 1 read with the parts of the decomposed support B%d", j)
        kind = SingularityType.ordinary(dec.m)
        entries.append(CensusEntry(kind, volume // dec.m, kind.delta, 1, f"S_{dec.m}"))
    return entries


def _clause_two_point(fibers, sets, normalized) -> List[CensusEntry]:
    entries = []
    for i in (1, 2):
        own, other = normalized[i - 1], normalized[2 - i]
        if len(own) != 2 or length(other) <= 1:
            continue
        kind = SingularityType.ordinary(length(other))
        ends = sets[i - 1]
        count = _mv2(fibers[i - 1][ends[0]], fibers[i - 1][ends[-1]])
        entries.append(CensusEntry(kind, count, kind.delta, 2, f"T{i}"))
    return entries


def _clause_ends(fibers, sets, n1, n2) -> List[CensusEntry]:
    entries = []
    b1, b2 = sets
    if not any(1 + s[0] in s for s in (n1, n2)):
        kind = SingularityType.sparse(*supports_at_zero(n1, n2))
        count = _mv2(fibers[0][b1[0]], fibers[1][b2[0]])
        entries.append(CensusEntry(kind, count, kind.delta, 3, "S0"))
    if not any(s[-1] - 1 in s for s in (n1, n2)):
        kind = SingularityType.sparse(*supports_at_infinity(n1, n2))
        count = _mv2(fibers[0][b1[-1]], fibers[1][b2[-1]])
        entries.append(CensusEntry(kind, count, kind.delta, 4, "Sinf"))
    return entries


def _clause_shifted_triples(fibers, sets, n1, n2) -> List[CensusEntry]:
    if len(n1) != 3 or n1 != n2:
        return []
    lifted = [SupportSet(tuple(p + (0,) for p in fibers[0][u])
                         + tuple(p + (1,) for p in fibers[1][v]), 3) for u, v in zip(*sets)]
    kind = SingularityType.ordinary(length(n1))
    count = mixed_volume([_hull(S) for S in lifted])
    return [CensusEntry(kind, count, kind.delta, 5, "T0")]


def census(A1: SupportSet, A2: SupportSet, convention: str = "direct") -> SingularityCensus:
    b1, b2, fibers = project_supports(A1, A2)
    n1, n2, norm = normalize_supports(b1, b2)
    check_exceptional(n1, n2)
    if norm.divisor > 1:
        logger.info("supports share the span %d; strata conditions use the rescaled sets",
                    norm.divisor)
    sets = (b1, b2)
    # Every applicability condition is read on the normalized supports; the
    # k-th normalized exponent indexes the fiber over the k-th original one.
    entries = _clause_decompositions((A1, A2), fibers, n1, n2, norm)
    entries += _clause_two_point(fibers, sets, (n1, n2))
    entries += _clause_ends(fibers, sets, n1, n2)
    entries += _clause_shifted_triples(fibers, sets, n1, n2)

    terms = thsum_terms(A1, A2, convention)
    total = terms.total
    nodes = total - sum(e.count * e.delta_each for e in entries)
    if nodes < 0:
        raise NegativeNodeCount("identified singularities exceed the total delta",
                                total_delta=total, nodes=nodes,
                                entries=[e.to_json() for e in entries])
    return SingularityCensus(tuple(entries), nodes, total, newton_polygon_of_projection(A1, A2),
                             terms.decision)


def newton_polygon_of_projection(A1: SupportSet, A2: SupportSet) -> LatticePolytope:
    return mixed_fiber_polygon(_hull(A1), _hull(A2), base_axis=0)


def total_delta(A1: SupportSet, A2: SupportSet, convention: str = "direct") -> int:
    return thsum_total(A1, A2, convention)


def triangle_prism_supports(B1: Sequence[int], B2: Sequence[int]) -> Tuple[SupportSet, SupportSet]:
    """A_i = B_i x (standard triangle): the projection realizes a generic plane
    section of the resultant of (B1, B2)."""
    return tuple(SupportSet(tuple((b,) + e for b in B for e in STANDARD_TRIANGLE), 3)
                 for B in (B1, B2))


def newton_area(census_result: SingularityCensus) -> Fraction:
    return 2 * euclidean_volume(census_result.newton_polygon)


def strata_mismatches(B1: Sequence[int], B2: Sequence[int],
                      convention: str = "direct") -> List[dict]:
    """Compare strata degrees of (B1, B2) with the singularity counts of the
    projection of B_i x (standard triangle); an empty list means agreement."""
    reports = strata_report(B1, B2)
    found = census(*triangle_prism_supports(B1, B2), convention=convention)
    out = []
    for report in reports:
        count = found.count(report.name)
        if count != report.degree:
            out.append({"stratum": report.name, "degree": report.degree, "count": count})
    named = {r.name for r in reports}
    for entry in found.entries:
        if entry.stratum not in named and entry.count:
            out.append({"stratum": entry.stratum, "degree": 0, "count": entry.count})
    if "S1" not in named and found.nodes:
        out.append({"stratum": "S1", "degree": 0, "count": found.nodes})
    return out
