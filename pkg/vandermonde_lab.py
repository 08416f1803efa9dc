# \file    vandermonde_lab.py
# \brief   Generalized Vandermonde matrices (x_i^{b_j}) at roots of unity:
#          combinatorial rank, exhaustive checks of the degeneracy lemmas,
#          the splitting-conjecture search and Schur determinant quotients.
#
#          Sweeps never build cyclotomic matrices. A minor is evaluated in the
#          group ring Z[Z/N] as a vector of signed permutation counts and then
#          reduced modulo the N-th cyclotomic polynomial by one integer matrix
#          product.

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from itertools import combinations, permutations
from math import gcd, lcm
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Matrix, Poly, QQ, symbols
from sympy.combinatorics import Permutation
from sympy.utilities.iterables import multiset_partitions

from errors import DivisionFailure, InconsistencyDetected, SchemaError, ZeroEntry
from exact_poly import ZETA, cyclotomic_modulus, root_of_unity
from lattice_core import SupportSet, span_gcd, tuple_span_gcd

logger = logging.getLogger(__name__)

X, Y, Z = symbols("x y z")

DEFAULT_WIDTH_BOUND = 5


@dataclass(frozen=True)
class RootTuple:
    """Nodes x_i = zeta_N^{e_i}."""
    order: int
    exponents: tuple

    def __post_init__(self):
        if self.order < 1:
            raise SchemaError("root order must be positive", order=self.order)
        residues = tuple(int(e) % self.order for e in self.exponents)
        if len(set(residues)) != len(residues):
            raise SchemaError("nodes must be distinct roots of unity",
                              order=self.order, exponents=list(self.exponents))
        object.__setattr__(self, "exponents", residues)

    def __len__(self):
        return len(self.exponents)


@dataclass(frozen=True)
class DegeneracyWitness:
    roots: RootTuple
    exponents: tuple
    classification: str          # proportional_rows | proportional_columns | counterexample
    partition: tuple = ()

    def to_json(self) -> dict:
        return {"order": self.roots.order, "nodes": list(self.roots.exponents),
                "exponents": list(self.exponents), "classification": self.classification,
                "partition": [list(p) for p in self.partition]}


@dataclass
class SweepReport:
    checked: int = 0
    degenerate: int = 0
    confirmed: int = 0
    counterexamples: List[DegeneracyWitness] = field(default_factory=list)

    def merge(self, other: "SweepReport") -> "SweepReport":
        self.checked += other.checked
        self.degenerate += other.degenerate
        self.confirmed += other.confirmed
        self.counterexamples.extend(other.counterexamples)
        return self

    def to_json(self) -> dict:
        return {"checked": self.checked, "degenerate": self.degenerate,
                "confirmed": self.confirmed,
                "counterexamples": [c.to_json() for c in self.counterexamples]}


# Combinatorial rank

def _proportional(u: Sequence, v: Sequence) -> bool:
    return all(u[j] * v[0] == v[j] * u[0] for j in range(1, len(u)))


def _class_count(vectors: Sequence[Sequence]) -> int:
    representatives: list = []
    for v in vectors:
        if not any(_proportional(v, r) for r in representatives):
            representatives.append(v)
    return len(representatives)


def comb_rank(M: Sequence[Sequence]) -> int:
    rows = [list(r) for r in M]
    for i, row in enumerate(rows):
        for j, entry in enumerate(row):
            if not entry:
                raise ZeroEntry("combinatorial rank needs nonzero entries", row=i, column=j)
    columns = [list(c) for c in zip(*rows)]
    return min(_class_count(rows), _class_count(columns))


def vdm_matrix(roots: RootTuple, B) -> list:
    values = B.values if isinstance(B, SupportSet) else tuple(B)
    return [[root_of_unity(roots.order, e * b) for b in values] for e in roots.exponents]


# Orders and spans

def ratio_order(order: int, e: int, f: int) -> int:
    return order // gcd(order, (e - f) % order)


def root_set_order(roots: RootTuple) -> int:
    """<X>: lcm of the orders of all pairwise ratios."""
    return _set_order(roots.order, roots.exponents)


def _set_order(order: int, exponents: Sequence[int]) -> int:
    return reduce(lcm, (ratio_order(order, e, f) for e, f in combinations(exponents, 2)), 1)


def _split_order(order: int, parts: Iterable[Sequence[int]]) -> int:
    return reduce(lcm, (_set_order(order, p) for p in parts), 1)


def _span(values: Sequence[int]) -> int:
    return span_gcd(values) if len(values) > 1 else 0


# Group-ring evaluation of minors

@lru_cache(maxsize=None)
def _reduction(order: int) -> np.ndarray:
    """Row k holds the coordinates of zeta^k in the power basis of Q(zeta_N)."""
    modulus = cyclotomic_modulus(order)
    width = modulus.degree()
    rows = np.zeros((order, width), dtype=np.int64)
    for k in range(order):
        rem = Poly(ZETA ** k, ZETA, domain=QQ).rem(modulus)
        for (p,), c in rem.terms():
            rows[k, p] = int(c)
    return rows


@lru_cache(maxsize=None)
def _signed_permutations(size: int) -> tuple:
    return tuple((p, Permutation(list(p)).signature()) for p in permutations(range(size)))


def minor_vanishes(order: int, nodes: Sequence[int], exponents: Sequence[int]) -> bool:
    counts = np.zeros(order, dtype=np.int64)
    for perm, sign in _signed_permutations(len(nodes)):
        k = sum(e * exponents[p] for e, p in zip(nodes, perm)) % order
        counts[k] += sign
    return not (counts @ _reduction(order)).any()


def _rank_below(order: int, nodes: Sequence[int], exponents: Sequence[int], size: int) -> bool:
    """True when every size x size minor vanishes."""
    return all(minor_vanishes(order, rows, cols)
               for rows in combinations(nodes, size)
               for cols in combinations(exponents, size))


def vdm_rank(roots: RootTuple, B: Sequence[int]) -> int:
    exponents = tuple(B)
    top = min(len(roots), len(exponents))
    for size in range(top, 0, -1):
        if not _rank_below(roots.order, roots.exponents, exponents, size):
            return size
    return 0


# Proportionality in terms of exponents

def _rows_proportional(order, nodes, exponents, i, k) -> bool:
    return all(((nodes[i] - nodes[k]) * (b - exponents[0])) % order == 0 for b in exponents)


def _columns_proportional(order, nodes, exponents, j, l) -> bool:
    return all(((e - nodes[0]) * (exponents[j] - exponents[l])) % order == 0 for e in nodes)


def classify_degeneracy(order: int, nodes: Sequence[int],
                        exponents: Sequence[int]) -> Tuple[str, tuple]:
    """Find two proportional rows or two proportional columns of (x_i^{b_j})."""
    for i, k in combinations(range(len(nodes)), 2):
        if _rows_proportional(order, nodes, exponents, i, k):
            return "proportional_rows", ((i, k),)
    for j, l in combinations(range(len(exponents)), 2):
        if _columns_proportional(order, nodes, exponents, j, l):
            return "proportional_columns", ((j, l),)
    return "counterexample", ()


# Canonical enumeration

def _units(order: int) -> list:
    return [u for u in range(1, order + 1) if gcd(u, order) == 1] if order > 1 else [1]


def _canonical(order: int, nodes: Sequence[int]) -> tuple:
    return min(tuple(sorted((u * e) % order for e in nodes)) for u in _units(order))


def canonical_nodes(order: int, count: int) -> List[tuple]:
    """Sets {0, e_1, ..., e_{count-1}} of distinct residues, one per Galois orbit."""
    out = []
    seen = set()
    for rest in combinations(range(1, order), count - 1):
        nodes = (0,) + rest
        key = _canonical(order, nodes)
        if key not in seen:
            seen.add(key)
            out.append(nodes)
    return out


def exponent_sets(size: int, bound: int) -> Iterable[tuple]:
    for rest in combinations(range(1, bound + 1), size - 1):
        yield (0,) + rest


def _run(worker, orders: Sequence[int], args: tuple, jobs: int) -> SweepReport:
    report = SweepReport()
    if jobs > 1 and len(orders) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(worker, orders, *([a] * len(orders) for a in args)):
                report.merge(part)
    else:
        for N in orders:
            report.merge(worker(N, *args))
    return report


# Exhaustive checks

def _sweep_3x3(order: int, exponent_bound: int) -> SweepReport:
    report = SweepReport()
    for nodes in canonical_nodes(order, 3):
        for exponents in exponent_sets(3, exponent_bound):
            report.checked += 1
            if not minor_vanishes(order, nodes, exponents):
                continue
            report.degenerate += 1
            kind, partition = classify_degeneracy(order, nodes, exponents)
            if kind == "counterexample":
                report.counterexamples.append(DegeneracyWitness(
                    RootTuple(order, nodes), exponents, kind))
            else:
                report.confirmed += 1
    return report


def sweep_3x3_lemma(order_bound: int, exponent_bound: int, jobs: int = 1) -> SweepReport:
    return _run(_sweep_3x3, range(3, order_bound + 1), (exponent_bound,), jobs)


def check_3x3_lemma(order_bound: int, exponent_bound: int, jobs: int = 1) -> List[DegeneracyWitness]:
    report = sweep_3x3_lemma(order_bound, exponent_bound, jobs)
    logger.info("3x3 sweep: %d matrices, %d degenerate, %d counterexamples",
                report.checked, report.degenerate, len(report.counterexamples))
    return report.counterexamples


def _two_part_splits(values: Sequence) -> Iterable[Tuple[tuple, tuple]]:
    first, rest = values[0], values[1:]
    for size in range(0, len(rest)):
        for chosen in combinations(rest, size):
            other = tuple(v for v in rest if v not in chosen)
            yield (first,) + chosen, other


def splitting_witness(order: int, nodes: Sequence[int],
                      exponents: Sequence[int]) -> Optional[DegeneracyWitness]:
    """A splitting of the nodes or of the exponents certifying rank 2, or None."""
    roots = RootTuple(order, nodes)
    span = _span(exponents)
    for X1, X2 in _two_part_splits(tuple(nodes)):
        if span % _split_order(order, (X1, X2)) == 0:
            return DegeneracyWitness(roots, tuple(exponents), "proportional_rows", (X1, X2))
    x_order = _set_order(order, nodes)
    for B1, B2 in _two_part_splits(tuple(exponents)):
        if gcd(_span(B1), _span(B2)) % x_order == 0:
            return DegeneracyWitness(roots, tuple(exponents), "proportional_columns", (B1, B2))
    return None


def _sweep_rank2(order: int, width_bound: int, exponent_bound: int) -> SweepReport:
    report = SweepReport()
    for nodes in canonical_nodes(order, 3):
        for width in range(3, width_bound + 1):
            for exponents in exponent_sets(width, exponent_bound):
                report.checked += 1
                if not _rank_below(order, nodes, exponents, 3):
                    continue
                if _rank_below(order, nodes, exponents, 2):
                    continue
                report.degenerate += 1
                if splitting_witness(order, nodes, exponents) is None:
                    report.counterexamples.append(DegeneracyWitness(
                        RootTuple(order, nodes), exponents, "counterexample"))
                else:
                    report.confirmed += 1
    return report


def check_rank2_splitting(order_bound: int, width_bound: int, exponent_bound: int,
                          jobs: int = 1) -> List[DegeneracyWitness]:
    report = _run(_sweep_rank2, range(3, order_bound + 1), (width_bound, exponent_bound), jobs)
    logger.info("rank-2 sweep: %d matrices, %d of rank 2, %d counterexamples",
                report.checked, report.degenerate, len(report.counterexamples))
    return report.counterexamples


def _sweep_rank1(order: int, rows: int, width_bound: int, exponent_bound: int) -> SweepReport:
    report = SweepReport()
    for nodes in canonical_nodes(order, rows):
        for width in range(2, width_bound + 1):
            for exponents in exponent_sets(width, exponent_bound):
                report.checked += 1
                if not _rank_below(order, nodes, exponents, 2):
                    continue
                report.degenerate += 1
                if _span(exponents) % _set_order(order, nodes) == 0:
                    report.confirmed += 1
                else:
                    report.counterexamples.append(DegeneracyWitness(
                        RootTuple(order, nodes), exponents, "counterexample"))
    return report


def check_rank1_remark(order_bound: int, exponent_bound: int, rows: int = 2,
                       width_bound: int = 3, jobs: int = 1) -> List[DegeneracyWitness]:
    """Rank-1 matrices (x_i^{b_j}) must have <X> dividing <B>."""
    report = _run(_sweep_rank1, range(rows, order_bound + 1),
                  (rows, width_bound, exponent_bound), jobs)
    return report.counterexamples


def conjectured_splitting(order: int, nodes: Sequence[int], exponents: Sequence[int],
                          parts: int) -> Optional[tuple]:
    """A split of B into at most `parts` classes whose span kills every node."""
    for count in range(1, parts + 1):
        for split in multiset_partitions(list(exponents), count):
            g = tuple_span_gcd([p if len(p) > 1 else (p[0], p[0]) for p in split])
            if all((e * g) % order == 0 for e in nodes):
                return tuple(tuple(p) for p in split)
    return None


def _sweep_conjecture(order: int, k: int, width_bound: int, exponent_bound: int) -> SweepReport:
    report = SweepReport()
    for nodes in canonical_nodes(order, k + 1):
        for width in range(k + 1, width_bound + 1):
            for exponents in exponent_sets(width, exponent_bound):
                if reduce(gcd, exponents) != 1:
                    continue
                report.checked += 1
                if not _rank_below(order, nodes, exponents, k + 1):
                    continue
                report.degenerate += 1
                split = conjectured_splitting(order, nodes, exponents, k)
                if split is not None:
                    report.confirmed += 1
                    continue
                witness = DegeneracyWitness(RootTuple(order, nodes), exponents, "counterexample")
                report.counterexamples.append(witness)
    return report


def conjecture_search(k: int, order_bound: int, exponent_bound: int,
                      width_bound: int = DEFAULT_WIDTH_BOUND, jobs: int = 1) -> SweepReport:
    if k < 1:
        raise SchemaError("k must be positive", k=k)
    report = _run(_sweep_conjecture, range(k + 1, order_bound + 1),
                  (k, width_bound, exponent_bound), jobs)
    if k <= 2 and report.counterexamples:
        logger.error("splitting counterexample for k=%d contradicts the rank-2 lemma; "
                     "suspect the enumeration first", k)
    logger.info("conjecture sweep k=%d: %d checked, %d degenerate, %d counterexamples",
                k, report.checked, report.degenerate, len(report.counterexamples))
    return report


def check_maximal_minor_lemma(rng: np.random.Generator, trials: int = 200,
                              rows: int = 3, columns: int = 5) -> Tuple[int, list]:
    """Random matrices assembled from proportional classes: whenever every
    maximal minor has combinatorial rank below `rows`, so must the matrix.
    Returns (hypothesis hits, violating matrices)."""
    hits, violations = 0, []
    for _ in range(trials):
        M = _random_pattern(rng, rows, columns)
        minors = [[[M[i][j] for j in cols] for i in range(rows)]
                  for cols in combinations(range(columns), rows)]
        if all(comb_rank(N) < rows for N in minors):
            hits += 1
            if comb_rank(M) >= rows:
                violations.append(M)
    return hits, violations


def _random_pattern(rng: np.random.Generator, rows: int, columns: int) -> list:
    values = [int(v) for v in rng.integers(1, 4, size=(rows, columns)).ravel()]
    M = [values[i * columns:(i + 1) * columns] for i in range(rows)]
    mode = int(rng.integers(0, 3))
    if mode == 0:
        classes = int(rng.integers(1, rows))
        for i in range(classes, rows):
            source = int(rng.integers(0, classes))
            scale = int(rng.integers(1, 4))
            M[i] = [scale * x for x in M[source]]
    elif mode == 1:
        classes = int(rng.integers(1, rows))
        for j in range(columns):
            source = int(rng.integers(0, classes))
            scale = int(rng.integers(1, 4))
            for i in range(rows):
                M[i][j] = scale * M[i][source]
    return M


# Schur polynomials

@dataclass(frozen=True)
class SchurResult:
    determinant: object
    quotient: object
    leading_monomial: tuple
    reduced_quotient: object = None
    reduced_leading_monomial: tuple = ()


def _det(a: int, b: int, c: int) -> Poly:
    rows = [[v ** a, v ** b, v ** c] for v in (X, Y, Z)]
    return Poly(Matrix(rows).det(), X, Y, Z, domain=QQ)


def _exact_quotient(num: Poly, den: Poly, **context) -> Poly:
    quotient, remainder = num.div(den)
    if not remainder.is_zero:
        raise DivisionFailure("determinant is not divisible", **context)
    return quotient


def _leading(p: Poly) -> tuple:
    return tuple(int(e) for e in p.monoms(order="lex")[0])


def schur_det(a: int, b: int, c: int) -> SchurResult:
    if not 0 <= a < b < c:
        raise SchemaError("exponents must satisfy 0 <= a < b < c", a=a, b=b, c=c)
    det = _det(a, b, c)
    quotient = _exact_quotient(det, _det(0, 1, 2), a=a, b=b, c=c)
    lead = _leading(quotient)
    if lead != (c - 2, b - 1, a):
        raise InconsistencyDetected("unexpected leading monomial of the Schur quotient",
                                    a=a, b=b, c=c, leading=list(lead))
    if a:
        return SchurResult(det.as_expr(), quotient.as_expr(), lead)
    n = gcd(b, c)
    reduced = _exact_quotient(det, _det(0, n, 2 * n), a=a, b=b, c=c, n=n)
    reduced_lead = _leading(reduced)
    if reduced_lead != (c - 2 * n, b - n, 0):
        raise InconsistencyDetected("unexpected leading monomial of det/det_{0,n,2n}",
                                    b=b, c=c, n=n, leading=list(reduced_lead))
    return SchurResult(det.as_expr(), quotient.as_expr(), lead,
                       reduced.as_expr(), reduced_lead)
