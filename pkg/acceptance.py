# \file    acceptance.py
# \brief   In-process acceptance suite behind the `selftest` command. Each
#          check returns a CheckResult; none of them raises on a failed
#          comparison, only on a genuine input or arithmetic error.

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from lattice_core import INFINITE, SupportSet
from polytope_geom import convex_hull, euclidean_volume
from projection_census import (plane_curve_supports, newton_polygon_of_projection, strata_mismatches,
                               triangle_prism_supports)
from settings import Settings
from sparse_delta import (delta_oracle, delta_sparse, make_degenerate_coefficients,
                          random_support_pair, sample_nondegenerate_coefficients)
from ultratrop import (fan_directions, newton_area_mixed_volume, tangency_matrix, thsum_total,
                       ultrametric_violations)
from vandermonde_lab import check_3x3_lemma

logger = logging.getLogger(__name__)

MFP_EXAMPLES = ((2, 3), (3, 4), (4, 7))
THSUM_EXAMPLES = ((((0, 2), (0, 3)), 1), (((0, 2), (0, 5)), 2), (((0, 4), (0, 5, 6)), 7),
                  (((0, 6), (0, 9, 10)), 22))
DUALITY_EXAMPLES = (((0, 1, 2), (0, 4)), ((0, 2, 3), (0, 1)), ((0, 1, 2), (0, 1, 2)))


@dataclass(frozen=True)
class Budget:
    """How much work each check does; `full` matches the published bounds."""
    oracle_pairs: int = 25
    degenerate_instances: int = 10
    random_fib_area: int = 5
    lemma_orders: int = 6
    lemma_exponents: int = 6

    @classmethod
    def full(cls) -> "Budget":
        return cls(oracle_pairs=100, random_fib_area=20, lemma_orders=12, lemma_exponents=10)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail,
                "seconds": round(self.seconds, 3)}


def _normalized(vertices) -> set:
    low = [min(v[i] for v in vertices) for i in range(2)]
    return {tuple(x - m for x, m in zip(v, low)) for v in vertices}


def delta_matches_oracle(rng: np.random.Generator, pairs: int) -> dict:
    failures = []
    for _ in range(pairs):
        B1, B2 = random_support_pair(rng)
        f1, f2 = sample_nondegenerate_coefficients(B1, B2, rng)
        expected, found = delta_sparse(B1, B2).delta, delta_oracle(f1, f2)
        if found != expected:
            failures.append({"B1": list(B1), "B2": list(B2), "formula": expected,
                             "oracle": str(found)})
    return {"pairs": pairs, "failures": failures}


def degenerate_excess(rng: np.random.Generator, instances: int, attempts: int = 2000) -> dict:
    built, failures = 0, []
    for _ in range(attempts):
        if built == instances:
            break
        B1, B2 = random_support_pair(rng)
        coefficients = make_degenerate_coefficients(B1, B2, rng)
        if coefficients is None:
            continue
        built += 1
        expected, found = delta_sparse(B1, B2).delta, delta_oracle(*coefficients)
        if found is not INFINITE and found <= expected:
            failures.append({"B1": list(B1), "B2": list(B2), "formula": expected,
                             "oracle": found})
    if built < instances:
        failures.append({"built": built, "wanted": instances})
    return {"instances": built, "failures": failures}


def mfp_triangles() -> dict:
    failures = []
    for h1, h2 in MFP_EXAMPLES:
        polygon = newton_polygon_of_projection(*plane_curve_supports((0, h1), (0, h2)))
        if _normalized(polygon.vertices) != {(0, 0), (0, h1), (h2, 0)}:
            failures.append({"h": [h1, h2],
                             "vertices": [[str(x) for x in v] for v in polygon.vertices]})
    return {"failures": failures}


def random_full_dimensional(rng: np.random.Generator, size: int = 5,
                            bound: int = 4) -> SupportSet:
    while True:
        points = {tuple(int(c) for c in rng.integers(0, bound + 1, size=3)) for _ in range(size)}
        if convex_hull(points, 3).is_full_dimensional:
            return SupportSet(tuple(points), 3)


def newton_area_identity(rng: np.random.Generator, random_pairs: int) -> dict:
    cases = [plane_curve_supports((0, h1), (0, h2)) for h1, h2 in MFP_EXAMPLES]
    cases += [(random_full_dimensional(rng), random_full_dimensional(rng))
              for _ in range(random_pairs)]
    failures = []
    for A1, A2 in cases:
        area = 2 * euclidean_volume(newton_polygon_of_projection(A1, A2))
        volume = newton_area_mixed_volume(A1, A2)
        if area != volume:
            failures.append({"A1": A1.to_json(), "A2": A2.to_json(),
                             "polygon_area": str(area), "mixed_volume": volume})
    return {"cases": len(cases), "failures": failures}


def thsum_examples(convention: str) -> dict:
    failures = []
    for (B1, B2), expected in THSUM_EXAMPLES:
        found = thsum_total(*plane_curve_supports(B1, B2), convention=convention)
        if found != expected:
            failures.append({"B1": list(B1), "B2": list(B2), "expected": expected,
                             "found": found})
    return {"convention": convention, "failures": failures}


def three_by_three_lemma(order_bound: int, exponent_bound: int, jobs: int) -> dict:
    witnesses = check_3x3_lemma(order_bound, exponent_bound, jobs)
    return {"order_bound": order_bound, "exponent_bound": exponent_bound,
            "failures": [w.to_json() for w in witnesses]}


def strata_census_duality(convention: str) -> dict:
    failures = []
    for B1, B2 in DUALITY_EXAMPLES:
        mismatches = strata_mismatches(B1, B2, convention)
        if mismatches:
            failures.append({"B1": list(B1), "B2": list(B2), "mismatches": mismatches})
    return {"failures": failures}


def tangency_ultrametricity() -> dict:
    cases = [plane_curve_supports(B1, B2) for (B1, B2), _ in THSUM_EXAMPLES]
    cases += [triangle_prism_supports(B1, B2) for B1, B2 in DUALITY_EXAMPLES]
    blocks, failures = 0, []
    for As in cases:
        for delta in fan_directions(As):
            matrix = tangency_matrix(As, delta)
            blocks += len(matrix.blocks)
            bad = ultrametric_violations(matrix)
            if bad:
                failures.append({"delta": list(delta.coords), "triples": bad})
    return {"blocks": blocks, "failures": failures}


def _timed(name: str, check: Callable[[], dict]) -> CheckResult:
    start = time.perf_counter()
    detail = check()
    result = CheckResult(name, not detail["failures"], detail, time.perf_counter() - start)
    if result.passed:
        logger.info("selftest %s passed in %.2fs", name, result.seconds)
    else:
        logger.error("selftest %s failed: %s", name, detail["failures"])
    return result


def run_selftest(settings: Settings, budget: Optional[Budget] = None) -> List[CheckResult]:
    budget = budget or Budget()
    rng = np.random.default_rng(settings.seed)
    convention = settings.g_convention
    return [
        _timed("delta_vs_oracle", lambda: delta_matches_oracle(rng, budget.oracle_pairs)),
        _timed("degenerate_excess",
               lambda: degenerate_excess(rng, budget.degenerate_instances)),
        _timed("mixed_fiber_triangles", mfp_triangles),
        _timed("newton_area_identity",
               lambda: newton_area_identity(rng, budget.random_fib_area)),
        _timed("thsum_examples", lambda: thsum_examples(convention)),
        _timed("three_by_three_lemma",
               lambda: three_by_three_lemma(budget.lemma_orders, budget.lemma_exponents,
                                            settings.jobs)),
        _timed("strata_census_duality", lambda: strata_census_duality(convention)),
        _timed("tangency_ultrametricity", tangency_ultrametricity),
    ]
