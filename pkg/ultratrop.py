# \file    ultratrop.py
# \brief   Tangency matrices from the nested boxes construction, G-sums along
#          directions of the tropical fan, and the total delta-invariant of
#          the plane projection of a sparse spatial curve (n = 1, k = 2).

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from functools import lru_cache
from itertools import combinations
from math import gcd
from typing import List, Optional, Sequence, Tuple

from errors import (AssumptionViolated, InconsistencyDetected, InfiniteIndex,
                    MathematicalInconsistency, ParityViolation, SchemaError)
from lattice_core import (Covector, IotaSequence, SupportSet, crop, difference_generators,
                          iota_sequence, rational_rank, vertical_index)
from polytope_geom import convex_hull, minkowski_sum, mixed_volume, sublattice_mixed_volume
from settings import G_CONVENTIONS

logger = logging.getLogger(__name__)

VERTICAL = 2


@dataclass(frozen=True)
class TangencyBlock:
    """Roots along one facet normal. `content` is the gcd of the normal's
    tail; a block holds content * (crop mixed volume) roots."""
    gamma: Covector
    size: int
    iota: IotaSequence
    content: int = 1


@dataclass(frozen=True)
class TangencyMatrix:
    entries: tuple
    blocks: tuple = ()

    @property
    def size(self) -> int:
        return len(self.entries)

    def entry_sum(self) -> int:
        return sum(sum(row) for row in self.entries)

    def block_ranges(self) -> List[range]:
        out, start = [], 0
        for block in self.blocks:
            out.append(range(start, start + block.size))
            start += block.size
        return out

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "entries": [list(row) for row in self.entries],
            "blocks": [{"gamma": list(b.gamma.coords), "size": b.size,
                        "iota": list(b.iota.values), "content": b.content}
                       for b in self.blocks],
        }


@dataclass(frozen=True)
class GSum:
    delta: tuple
    direct: int
    closed_form: int
    calibrated: int

    def value(self, convention: str) -> int:
        if convention not in G_CONVENTIONS:
            raise ValueError(f"unknown G convention {convention}")
        return getattr(self, convention)


@dataclass(frozen=True)
class AssumptionDiagnostics:
    vertical_index: object
    indv1: bool
    same_proj: bool
    failures: tuple = ()

    def __bool__(self):
        return self.indv1 and self.same_proj


@dataclass(frozen=True)
class ConventionDecision:
    """Which G convention feeds the delta sum. `rejected` lists the
    conventions tried first and the analytic curves each one got wrong."""
    requested: str
    used: str
    rejected: tuple = ()

    @property
    def flipped(self) -> bool:
        return self.used != self.requested

    def to_json(self) -> dict:
        return {"requested": self.requested, "used": self.used, "flipped": self.flipped,
                "rejected": list(self.rejected)}


@dataclass(frozen=True)
class ThsumTerms:
    newton_area: int
    mixed_with_sum: int
    horizontal: int
    g_sums: tuple
    decision: Optional[ConventionDecision] = None

    @property
    def euler_normalization(self) -> int:
        return self.horizontal - self.mixed_with_sum

    @property
    def convention(self) -> str:
        return self.decision.used if self.decision else "direct"

    def g_total_for(self, convention: str) -> int:
        return sum(g.value(convention) for g in self.g_sums)

    @property
    def g_total(self) -> int:
        return self.g_total_for(self.convention)

    def total_for(self, convention: str) -> int:
        g_total = self.g_total_for(convention)
        total = labstr_delta_sum(self.euler_normalization, self.newton_area, g_total)
        if total < 0:
            raise InconsistencyDetected("negative delta sum", total=total, convention=convention)
        return total

    @property
    def total(self) -> int:
        return self.total_for(self.convention)


def _hulls(As: Sequence[SupportSet]) -> list:
    return [convex_hull(A.points) for A in As]


def _sum_polytope(As: Sequence[SupportSet]):
    hulls = _hulls(As)
    total = hulls[0]
    for P in hulls[1:]:
        total = minkowski_sum(total, P)
    return total


def _facet_normals(As: Sequence[SupportSet]) -> List[Covector]:
    P = _sum_polytope(As)
    if not P.is_full_dimensional:
        raise AssumptionViolated("the Minkowski sum of the hulls is not full-dimensional",
                                 adim=P.adim, dim=P.dim)
    return [Covector(f.normal) for f in P.facets]


def direction_extensions(As: Sequence[SupportSet], delta: Covector,
                         k: int = VERTICAL) -> List[Covector]:
    """Facet normals of the sum of hulls whose tail on Z^k is a positive
    multiple of `delta`."""
    if not delta.primitive:
        raise AssumptionViolated("direction must be primitive", delta=list(delta.coords))
    return [g for g in _facet_normals(As)
            if any(g.tail(k)) and _direction_of(g, k) == delta]


def _direction_of(gamma: Covector, k: int) -> Covector:
    return Covector(gamma.tail(k)).primitive_part()


def tail_content(gamma: Covector, k: int = VERTICAL) -> int:
    return gcd(*gamma.tail(k))


def fan_directions(As: Sequence[SupportSet], k: int = VERTICAL) -> List[Covector]:
    """Every delta with at least one facet extension, in sorted order."""
    out = {_direction_of(g, k).coords for g in _facet_normals(As) if any(g.tail(k))}
    return [Covector(d) for d in sorted(out)]


def _crops(As, gamma: Covector) -> List[SupportSet]:
    return [crop(A, gamma, 0) for A in As]


def _crop_mixed_volume(As, gamma: Covector) -> int:
    return sublattice_mixed_volume(_hulls(_crops(As, gamma)))


def _same_proj_failures(As, k: int) -> list:
    failures = []
    q = len(As)
    for gamma in _facet_normals(As):
        tail = gamma.tail(k)
        if not any(tail):
            continue
        kernel = (0,) * (As[0].dim - k) + (tail[1], -tail[0])
        crops = _crops(As, gamma)
        for size in range(1, q):
            for J in combinations(range(q), size):
                diffs = difference_generators([crops[m] for m in J])
                rank = rational_rank(diffs)
                if rank == size and rational_rank(diffs + [kernel]) == rank:
                    failures.append({"gamma": list(gamma.coords), "subtuple": list(J)})
    return failures


def check_assumptions(As: Sequence[SupportSet], k: int = VERTICAL) -> AssumptionDiagnostics:
    index = vertical_index(As, k)
    failures = _same_proj_failures(As, k)
    diagnostics = AssumptionDiagnostics(index, index == 1, not failures, tuple(failures))
    if not diagnostics:
        logger.warning("assumption check failed: ind_v=%s, %d same_proj failures",
                       index, len(failures))
    return diagnostics


def _box_sizes(size: int, iota: IotaSequence) -> list:
    if not iota.is_finite:
        raise InfiniteIndex("iota-sequence has infinite entries",
                            iota=[str(v) for v in iota.values])
    if size % iota[0]:
        raise InconsistencyDetected("block size is not a multiple of i_1",
                                    size=size, iota=list(iota.values))
    return list(iota.values)


def nested_boxes(size: int, iota: IotaSequence) -> list:
    """Addresses of `size` elements: entry d is the number of the level-d box."""
    sizes = _box_sizes(size, iota)
    return [tuple(r // s for s in sizes) for r in range(size)]


def _depth(a: tuple, b: tuple) -> int:
    return next(K + 1 for K, (x, y) in enumerate(zip(a, b)) if x != y)


def _block_entries(size: int, iota: IotaSequence) -> list:
    addresses = nested_boxes(size, iota)
    return [[0 if r == s else _depth(addresses[r], addresses[s]) for s in range(size)]
            for r in range(size)]


def nested_boxes_matrix(As: Sequence[SupportSet], gamma: Covector,
                        k: int = VERTICAL) -> TangencyMatrix:
    content = tail_content(gamma, k)
    size = content * _crop_mixed_volume(As, gamma)
    if size <= 0:
        return TangencyMatrix((), ())
    iota = iota_sequence(As, gamma, k)
    entries = tuple(tuple(row) for row in _block_entries(size, iota))
    return TangencyMatrix(entries, (TangencyBlock(gamma, size, iota, content),))


def direct_sum(blocks: Sequence[TangencyMatrix]) -> TangencyMatrix:
    size = sum(b.size for b in blocks)
    rows = [[0] * size for _ in range(size)]
    start = 0
    for b in blocks:
        for r, row in enumerate(b.entries):
            rows[start + r][start:start + b.size] = row
        start += b.size
    return TangencyMatrix(tuple(tuple(r) for r in rows),
                          tuple(block for b in blocks for block in b.blocks))


def tangency_matrix(As: Sequence[SupportSet], delta: Covector,
                    k: int = VERTICAL) -> TangencyMatrix:
    blocks = [nested_boxes_matrix(As, gamma, k) for gamma in direction_extensions(As, delta, k)]
    return direct_sum([b for b in blocks if b.size])


def _calibrated_block_sum(matrix: TangencyMatrix, block: TangencyBlock, rows: range) -> int:
    """Sum of (entry - 1) / content over the off-diagonal entries of one block."""
    excess = sum(matrix.entries[r][s] - 1 for r in rows for s in rows if r != s)
    if excess % block.content:
        raise InconsistencyDetected("tangency excess is not divisible by the tail content",
                                    gamma=list(block.gamma.coords), excess=excess,
                                    content=block.content)
    return excess // block.content


def g_sum(As: Sequence[SupportSet], delta: Covector, k: int = VERTICAL) -> GSum:
    matrix = tangency_matrix(As, delta, k)
    direct = matrix.entry_sum()
    closed = sum(b.iota[0] * (i - 1) for b in matrix.blocks for i in b.iota.values)
    calibrated = sum(_calibrated_block_sum(matrix, block, rows)
                     for block, rows in zip(matrix.blocks, matrix.block_ranges()))
    if direct != closed:
        logger.info("G for %s: direct %d, closed form %d, calibrated %d",
                    delta.coords, direct, closed, calibrated)
    return GSum(delta.coords, direct, closed, calibrated)


def g_sums(As: Sequence[SupportSet], k: int = VERTICAL) -> List[GSum]:
    return [g_sum(As, delta, k) for delta in fan_directions(As, k)]


def ultrametric_violations(matrix: TangencyMatrix) -> list:
    """Triples (p, q, r) inside one block with g[p][r] < min(g[p][q], g[q][r])."""
    g = matrix.entries
    out = []
    for block in matrix.block_ranges():
        for p, q, r in combinations(block, 3):
            for a, b, c in ((p, q, r), (q, r, p), (r, p, q)):
                if g[a][c] < min(g[a][b], g[b][c]):
                    out.append((a, b, c))
    return out


def labstr_delta_sum(euler_normalization: int, newton_area: int, g_total: int) -> int:
    twice = euler_normalization + newton_area - g_total
    if twice % 2:
        raise ParityViolation("odd total in the delta sum", euler=euler_normalization,
                              newton_area=newton_area, g_total=g_total)
    return twice // 2


def quotient_embeddings(A: SupportSet) -> Tuple[SupportSet, SupportSet]:
    """Images of A in Z^3 + Z^3 modulo the vertical pairs (v, -v), as Z^4
    with coordinates (x, x', y)."""
    if A.dim != 3:
        raise AssumptionViolated("embeddings are defined for supports in Z^3", dim=A.dim)
    j1 = SupportSet(tuple((a[0], 0, a[1], a[2]) for a in A), 4)
    j2 = SupportSet(tuple((0, a[0], a[1], a[2]) for a in A), 4)
    return j1, j2


def newton_area_mixed_volume(A1: SupportSet, A2: SupportSet) -> int:
    (a1, b1), (a2, b2) = quotient_embeddings(A1), quotient_embeddings(A2)
    return mixed_volume(_hulls([a1, a2, b1, b2]))


def horizontal_term(As: Sequence[SupportSet], k: int = VERTICAL) -> int:
    total = 0
    for gamma in _facet_normals(As):
        if any(gamma.tail(k)):
            continue
        total += _crop_mixed_volume(As, gamma)
    return total


def _sumset(A1: SupportSet, A2: SupportSet) -> SupportSet:
    points = {tuple(x + y for x, y in zip(a, b)) for a in A1 for b in A2}
    return SupportSet(tuple(points), A1.dim)


def plane_curve_supports(B1: Sequence[int], B2: Sequence[int]) -> Tuple[SupportSet, SupportSet]:
    """Supports whose generic curve projects to the plane curve t -> (f1(t), f2(t))
    with f_i supported at B_i."""
    A1 = SupportSet(tuple({(b, 0, 0) for b in B1} | {(0, 1, 0)}), 3)
    A2 = SupportSet(tuple({(b, 0, 0) for b in B2} | {(0, 0, 1)}), 3)
    return A1, A2


def thsum_parts(A1: SupportSet, A2: SupportSet) -> ThsumTerms:
    """Every term of the delta sum, with no G convention chosen yet."""
    As = (A1, A2)
    if A1.dim != 3 or A2.dim != 3:
        raise AssumptionViolated("thsum is wired for two supports in Z^3",
                                 dims=[A1.dim, A2.dim])
    diagnostics = check_assumptions(As)
    if not diagnostics:
        raise AssumptionViolated("supports fail the standing assumptions",
                                 vertical_index=str(diagnostics.vertical_index),
                                 same_proj=list(diagnostics.failures))
    area = newton_area_mixed_volume(A1, A2)
    with_sum = mixed_volume(_hulls([A1, A2, _sumset(A1, A2)]))
    return ThsumTerms(area, with_sum, horizontal_term(As), tuple(g_sums(As)))


# Plane curves whose delta-invariant is known in closed form. The last one has
# a facet normal whose tail is twice a primitive direction.
ANALYTIC_TOTALS = (
    ((0, 2), (0, 3), 1),
    ((0, 2), (0, 5), 2),
    ((0, 4), (0, 5, 6), 7),
)


@lru_cache(maxsize=None)
def _analytic_parts(B1: tuple, B2: tuple) -> ThsumTerms:
    return thsum_parts(*plane_curve_supports(B1, B2))


def convention_failures(convention: str) -> List[dict]:
    """Analytic curves on which `convention` gives the wrong total."""
    failures = []
    for B1, B2, expected in ANALYTIC_TOTALS:
        try:
            found = _analytic_parts(B1, B2).total_for(convention)
        except MathematicalInconsistency as e:
            found = type(e).__name__
        if found != expected:
            failures.append({"B1": list(B1), "B2": list(B2), "expected": expected,
                             "found": found})
    return failures


@lru_cache(maxsize=None)
def resolve_convention(requested: str = "direct") -> ConventionDecision:
    """Wire `requested` into the delta sum unless it misses an analytic total;
    then the first other convention that reproduces all of them is used."""
    if requested not in G_CONVENTIONS:
        raise SchemaError(f"unknown G convention `{requested}`", allowed=list(G_CONVENTIONS))
    rejected = []
    for convention in (requested,) + tuple(c for c in G_CONVENTIONS if c != requested):
        failures = convention_failures(convention)
        if not failures:
            if rejected:
                logger.warning("G convention %s misses %d analytic totals; using %s",
                               requested, len(rejected[0]["failures"]), convention)
            return ConventionDecision(requested, convention, tuple(rejected))
        rejected.append({"convention": convention, "failures": failures})
    raise InconsistencyDetected("no G convention reproduces the analytic totals",
                                rejected=rejected)


def thsum_terms(A1: SupportSet, A2: SupportSet, convention: str = "direct") -> ThsumTerms:
    parts = replace(thsum_parts(A1, A2), decision=resolve_convention(convention))
    logger.debug("thsum: area %d, MV3 %d, horizontal %d, G %d (%s) -> %d",
                 parts.newton_area, parts.mixed_with_sum, parts.horizontal,
                 parts.g_total, parts.convention, parts.total)
    return parts


def thsum_total(A1: SupportSet, A2: SupportSet, convention: str = "direct") -> int:
    return thsum_terms(A1, A2, convention).total
