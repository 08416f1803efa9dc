# \file    polytope_geom.py
# \brief   Exact convex geometry in dimension <= 4: hulls, lattice volumes,
#          Minkowski sums and differences, mixed volumes, fiber polygons and
#          mixed fiber polygons.
#
#          Hulls are computed by gift wrapping on integer coordinates (rational
#          inputs are scaled by a common denominator first). Facets of facets
#          come out of the recursion, so the whole face lattice is available
#          for the pulling triangulation used by the volume routines.
"""Exact convex geometry for lattice polytopes of dimension at most MAX_DIM = 4.

convex_hull is an exact gift-wrapping hull over integers and Fractions. Any
ambient dimension above MAX_DIM raises DimensionUnsupported, and so does a
mixed volume of more than MAX_DIM polytopes. Larger supports must be
projected first.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations
from math import factorial, gcd, lcm
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from sympy import Matrix

from errors import DimensionUnsupported, NotASummand, NotCoplanar, NotFullDimensional, SchemaError
from lattice_core import pivot_axes, rational_rank, saturation_index

logger = logging.getLogger(__name__)

MAX_DIM = 4

Point = Tuple[Fraction, ...]


# Face lattice engine (integer coordinates, full-dimensional input)

class _Facet(NamedTuple):
    members: frozenset
    normal: tuple
    offset: int


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _primitive(v):
    g = gcd(*v)
    return tuple(x // g for x in v)


def _affine_rank(points) -> int:
    if len(points) < 2:
        return 0
    p0 = points[0]
    return rational_rank([_sub(p, p0) for p in points[1:]])


def _independent(a, b) -> bool:
    return any(a[i] * b[j] != a[j] * b[i] for i, j in combinations(range(len(a)), 2))


def _integral(v) -> tuple:
    den = reduce(lcm, (int(Fraction(str(x)).denominator) for x in v), 1)
    return _primitive(tuple(int(Fraction(str(x)) * den) for x in v))


def _wrap_step(coords, members, normal, other, origin) -> _Facet:
    """Rotate the hyperplane (normal) about the face through `origin`
    spanned together with `other` until it hits the next point."""
    best = None
    for i, c in enumerate(coords):
        if i in members:
            continue
        v = _sub(c, origin)
        u, w = _dot(normal, v), _dot(other, v)
        if best is None or best[0] * u - best[1] * w > 0:
            best = (w, u)
    w, u = best
    nu = _primitive(tuple(w * a - u * b for a, b in zip(normal, other)))
    offset = _dot(nu, origin)
    if any(_dot(nu, c) > offset for c in coords):
        nu = tuple(-x for x in nu)
        offset = -offset
    return _Facet(frozenset(i for i, c in enumerate(coords) if _dot(nu, c) == offset), nu, offset)


def _initial_facet(coords, dim) -> _Facet:
    shadow = [c[:-1] for c in coords]
    if dim == 2:
        top = max(c[0] for c in shadow)
        base = _Facet(frozenset(i for i, c in enumerate(shadow) if c[0] == top), (1,), top)
    else:
        base = _initial_facet(shadow, dim - 1)
    normal = base.normal + (0,)
    face = [coords[i] for i in sorted(base.members)]
    if _affine_rank(face) == dim - 1:
        return _Facet(base.members, normal, base.offset)
    origin = face[0]
    diffs = [_sub(p, origin) for p in face[1:] if any(_sub(p, origin))]
    if diffs:
        pencil = [_integral(v) for v in Matrix(diffs).nullspace()]
    else:
        pencil = [tuple(int(i == j) for j in range(dim)) for i in range(dim)]
    other = next(v for v in pencil if _independent(v, normal))
    return _wrap_step(coords, base.members, normal, other, origin)


def _ridges(coords, facet: _Facet, dim):
    j = next(i for i, a in enumerate(facet.normal) if a)
    index = sorted(facet.members)
    local = [coords[i][:j] + coords[i][j + 1:] for i in index]
    sub_facets, sub_lattice = _face_lattice(local, dim - 1)

    def lift(members):
        return frozenset(index[t] for t in members)

    ridges = [_Facet(lift(f.members), f.normal[:j] + (0,) + f.normal[j:], f.offset)
              for f in sub_facets]
    lattice = {lift(k): [lift(s) for s in v] for k, v in sub_lattice.items()}
    return ridges, lattice


def _face_lattice(coords, dim):
    """Facets of a full-dimensional point configuration in Z^dim, plus the
    map from every lower face (as a set of point indices) to its facets."""
    if dim == 1:
        values = [c[0] for c in coords]
        lo, hi = min(values), max(values)
        return [
            _Facet(frozenset(i for i, v in enumerate(values) if v == lo), (-1,), -lo),
            _Facet(frozenset(i for i, v in enumerate(values) if v == hi), (1,), hi),
        ], {}
    first = _initial_facet(coords, dim)
    found = {first.members: first}
    lattice: Dict[frozenset, list] = {}
    queue = deque([first])
    while queue:
        facet = queue.popleft()
        ridges, sub_lattice = _ridges(coords, facet, dim)
        lattice.update(sub_lattice)
        lattice[facet.members] = [r.members for r in ridges]
        for ridge in ridges:
            origin = coords[next(iter(ridge.members))]
            neighbour = _wrap_step(coords, facet.members, facet.normal, ridge.normal, origin)
            if neighbour.members not in found:
                found[neighbour.members] = neighbour
                queue.append(neighbour)
    return list(found.values()), lattice


class _Hull(NamedTuple):
    coords: list            # integer coordinates in the affine frame
    adim: int
    facets: list
    lattice: dict
    top: frozenset


def _hull(int_points) -> Tuple[_Hull, tuple]:
    origin = int_points[0]
    axes = pivot_axes([_sub(p, origin) for p in int_points[1:]])
    adim = len(axes)
    coords = [tuple(p[j] for j in axes) for p in int_points]
    top = frozenset(range(len(coords)))
    if adim == 0:
        return _Hull(coords, 0, [], {}, top), axes
    facets, lattice = _face_lattice(coords, adim)
    lattice[top] = [f.members for f in facets]
    return _Hull(coords, adim, facets, lattice, top), axes


def _face_vertices(face, fdim, lattice, memo) -> frozenset:
    if fdim == 0:
        return face
    if face not in memo:
        memo[face] = frozenset().union(
            *(_face_vertices(f, fdim - 1, lattice, memo) for f in lattice[face]))
    return memo[face]


def _pulling_simplices(face, fdim, lattice, memo) -> list:
    if fdim == 0:
        return [tuple(face)]
    apex = min(_face_vertices(face, fdim, lattice, memo))
    simplices = []
    for sub in lattice[face]:
        if apex in sub:
            continue
        simplices.extend((apex,) + s for s in _pulling_simplices(sub, fdim - 1, lattice, memo))
    return simplices


def _scaled(points) -> Tuple[list, int]:
    den = reduce(lcm, (Fraction(x).denominator for p in points for x in p), 1)
    return [tuple(int(Fraction(x) * den) for x in p) for p in points], den


# Public polytope type

@dataclass(frozen=True)
class Facet:
    normal: tuple
    offset: Fraction


@dataclass(frozen=True)
class LatticePolytope:
    vertices: tuple
    facets: tuple
    dim: int
    adim: int
    _volume: Fraction = field(default=Fraction(0), compare=False, repr=False)

    @property
    def is_full_dimensional(self) -> bool:
        return self.adim == self.dim

    @cached_property
    def is_lattice(self) -> bool:
        return all(x.denominator == 1 for v in self.vertices for x in v)

    def support(self, u: Sequence) -> Fraction:
        return max(sum(Fraction(a) * x for a, x in zip(u, v)) for v in self.vertices)

    def face(self, u: Sequence) -> tuple:
        top = self.support(u)
        return tuple(v for v in self.vertices
                     if sum(Fraction(a) * x for a, x in zip(u, v)) == top)

    def translate(self, shift: Sequence) -> "LatticePolytope":
        return convex_hull([tuple(x + Fraction(s) for x, s in zip(v, shift))
                            for v in self.vertices])

    def scale(self, factor) -> "LatticePolytope":
        factor = Fraction(factor)
        return convex_hull([tuple(factor * x for x in v) for v in self.vertices])

    def to_json(self) -> dict:
        return {"dim": self.dim,
                "vertices": [[[x.numerator, x.denominator] for x in v] for v in self.vertices]}


def convex_hull(points: Sequence[Sequence], dim: Optional[int] = None) -> LatticePolytope:
    pts = sorted({tuple(Fraction(x) for x in p) for p in points})
    if not pts:
        raise SchemaError("cannot take the hull of no points")
    dim = len(pts[0]) if dim is None else dim
    if dim > MAX_DIM:
        raise DimensionUnsupported(f"dimension {dim} exceeds {MAX_DIM}", dim=dim)
    if any(len(p) != dim for p in pts):
        raise SchemaError("points have mixed dimensions")
    int_points, den = _scaled(pts)
    hull, axes = _hull(int_points)
    if hull.adim == 0:
        return LatticePolytope((pts[0],), (), dim, 0, Fraction(0))
    verts = _face_vertices(hull.top, hull.adim, hull.lattice, {})
    facets = []
    for f in hull.facets:
        normal = [0] * dim
        for j, a in zip(axes, f.normal):
            normal[j] = a
        facets.append(Facet(tuple(normal), Fraction(f.offset, den)))
    volume = Fraction(0)
    if hull.adim == dim:
        scaled = sum(abs(Matrix([_sub(hull.coords[i], hull.coords[s[0]]) for i in s[1:]]).det())
                     for s in _pulling_simplices(hull.top, dim, hull.lattice, {}))
        volume = Fraction(int(scaled), factorial(dim) * den ** dim)
    return LatticePolytope(tuple(pts[i] for i in sorted(verts)), tuple(facets),
                           dim, hull.adim, volume)


def euclidean_volume(P: LatticePolytope) -> Fraction:
    return P._volume if P.is_full_dimensional else Fraction(0)


def lattice_volume(P: LatticePolytope) -> Fraction:
    if not P.is_full_dimensional:
        raise NotFullDimensional("lattice volume needs a full-dimensional polytope",
                                 dim=P.dim, adim=P.adim)
    return factorial(P.dim) * P._volume


def minkowski_sum(P: LatticePolytope, Q: LatticePolytope) -> LatticePolytope:
    if P.dim != Q.dim:
        raise SchemaError("Minkowski summands live in different dimensions",
                          dims=[P.dim, Q.dim])
    return convex_hull([tuple(a + b for a, b in zip(p, q))
                        for p in P.vertices for q in Q.vertices], P.dim)


def mixed_volume(Ps: Sequence[LatticePolytope]) -> int:
    d = len(Ps)
    if d == 0:
        return 1
    if d > MAX_DIM:
        raise DimensionUnsupported(f"dimension {d} exceeds {MAX_DIM}", dim=d)
    if any(P.dim != d for P in Ps):
        raise SchemaError("mixed volume needs d polytopes in Q^d", count=d,
                          dims=[P.dim for P in Ps])
    sums = {0: None}
    total = Fraction(0)
    for mask in range(1, 1 << d):
        low = mask & -mask
        i = low.bit_length() - 1
        rest = sums[mask ^ low]
        sums[mask] = Ps[i] if rest is None else minkowski_sum(rest, Ps[i])
        sign = -1 if (d - bin(mask).count("1")) % 2 else 1
        total += sign * euclidean_volume(sums[mask])
    return int(total) if total.denominator == 1 else total


def sublattice_mixed_volume(Ps: Sequence[LatticePolytope]) -> int:
    k = len(Ps)
    diffs = []
    for P in Ps:
        v0 = P.vertices[0]
        diffs.extend(_sub(v, v0) for v in P.vertices[1:])
    if any(x.denominator != 1 for v in diffs for x in v):
        raise NotCoplanar("sublattice mixed volume needs lattice polytopes")
    diffs = [tuple(int(x) for x in v) for v in diffs if any(v)]
    rank = rational_rank(diffs)
    if rank > k:
        raise NotCoplanar(f"the {k} polytopes span a {rank}-dimensional space", k=k, rank=rank)
    if rank < k:
        return 0
    axes = pivot_axes(diffs)
    projected = [convex_hull([tuple(_sub(v, P.vertices[0])[j] for j in axes)
                              for v in P.vertices], k) for P in Ps]
    image = [tuple(v[j] for j in axes) for v in diffs]
    value = Fraction(mixed_volume(projected) * saturation_index(diffs), saturation_index(image))
    return int(value)


# Polygons by edge fans: primitive edge direction -> length multiplier

def _edge_direction(e) -> tuple:
    den = reduce(lcm, (x.denominator for x in e), 1)
    return _primitive(tuple(int(x * den) for x in e))


def _polygon_vertices(points) -> list:
    """Counter-clockwise hull of planar points (monotone chain)."""
    points = sorted(set(points))
    if len(points) <= 2:
        return points

    def chain(seq):
        out = []
        for p in seq:
            while len(out) > 1 and (
                    (out[-1][0] - out[-2][0]) * (p[1] - out[-2][1])
                    - (p[0] - out[-2][0]) * (out[-1][1] - out[-2][1])) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = chain(points)
    upper = chain(reversed(points))
    return lower[:-1] + upper[:-1]


def _edge_fan(vertices) -> Dict[tuple, Fraction]:
    fan: Dict[tuple, Fraction] = {}
    if len(vertices) < 2:
        return fan
    for a, b in zip(vertices, vertices[1:] + vertices[:1]):
        e = _sub(b, a)
        key = _edge_direction(e)
        fan[key] = fan.get(key, Fraction(0)) + Fraction(e[0] if key[0] else e[1],
                                                        key[0] if key[0] else key[1])
    return fan


def _angle_key(direction):
    x, y = direction
    r = Fraction(x, abs(x) + abs(y))
    return (0, -r) if y > 0 or (y == 0 and x > 0) else (1, r)


def _fan_polygon(fan) -> List[Point]:
    edges = [(key, length) for key, length in fan.items() if length]
    if not edges:
        return [(Fraction(0), Fraction(0))]
    if any(length < 0 for _, length in edges):
        raise NotASummand("Minkowski difference produced a negative edge",
                          edges=[[list(k), str(v)] for k, v in edges if v < 0])
    edges.sort(key=lambda kv: _angle_key(kv[0]))
    walk = [(Fraction(0), Fraction(0))]
    for (x, y), length in edges:
        px, py = walk[-1]
        walk.append((px + length * x, py + length * y))
    if walk[-1] != walk[0]:
        raise NotASummand("Minkowski difference does not close up",
                          gap=[str(c) for c in walk[-1]])
    walk.pop()
    lo = (min(p[0] for p in walk), min(p[1] for p in walk))
    return [(p[0] - lo[0], p[1] - lo[1]) for p in walk]


def _fan_add(*terms) -> Dict[tuple, Fraction]:
    """Linear combination of edge fans given as (coefficient, fan) pairs."""
    out: Dict[tuple, Fraction] = {}
    for coefficient, fan in terms:
        for key, length in fan.items():
            out[key] = out.get(key, Fraction(0)) + coefficient * length
    return out


def fiber_slice(P: LatticePolytope, base_axis: int, t) -> list:
    """Vertices of the fiber of a 3-polytope over the base value t."""
    t = Fraction(t)
    rest = [j for j in range(P.dim) if j != base_axis]
    points = []
    verts = P.vertices
    for v in verts:
        if v[base_axis] == t:
            points.append(tuple(v[j] for j in rest))
    for v, w in combinations(verts, 2):
        lo, hi = sorted((v, w), key=lambda p: p[base_axis])
        if lo[base_axis] < t < hi[base_axis]:
            s = (t - lo[base_axis]) / (hi[base_axis] - lo[base_axis])
            points.append(tuple(lo[j] + s * (hi[j] - lo[j]) for j in rest))
    return _polygon_vertices(points)


def _fiber_fan(P: LatticePolytope, base_axis: int) -> Dict[tuple, Fraction]:
    if P.dim != 3:
        raise DimensionUnsupported("fiber polygons are taken over 3-polytopes", dim=P.dim)
    levels = sorted({v[base_axis] for v in P.vertices})
    fans = [_edge_fan(fiber_slice(P, base_axis, t)) for t in levels]
    terms = []
    for (t0, f0), (t1, f1) in zip(zip(levels, fans), zip(levels[1:], fans[1:])):
        half = (t1 - t0) / 2
        terms += [(half, f0), (half, f1)]
    return _fan_add(*terms)


def _polygon(vertices) -> LatticePolytope:
    return convex_hull(vertices or [(Fraction(0), Fraction(0))], 2)


def fiber_polygon(P: LatticePolytope, base_axis: int = 0) -> LatticePolytope:
    """Minkowski integral of the fibers of P over the base coordinate."""
    return _polygon(_fan_polygon(_fiber_fan(P, base_axis)))


def mixed_fiber_polygon(P: LatticePolytope, Q: LatticePolytope,
                        base_axis: int = 0) -> LatticePolytope:
    total = _fiber_fan(minkowski_sum(P, Q), base_axis)
    mixed = _fan_add((1, total), (-1, _fiber_fan(P, base_axis)), (-1, _fiber_fan(Q, base_axis)))
    return _polygon(_fan_polygon(mixed))


def lattice_width(P: LatticePolytope, direction: Sequence[int]) -> Fraction:
    """Width of P along the functional `direction`."""
    neg = tuple(-a for a in direction)
    return P.support(direction) + P.support(neg)
