"""Rational polyhedral cones and polytopes.

Cones are pointed and full-dimensional, carried in both generator (ray)
and facet (halfspace) form; duality swaps the two.  Ray/facet enumeration
uses incremental double description with the combinatorial adjacency test,
which is exact and adequate for the ranks this tool supports (<= 8).

Polytopes carry a vertex list and an irredundant inequality description
``<normal, x> <= offset`` simultaneously; triangulation is the
deterministic pulling triangulation anchored at the lexicographically
smallest vertex, so identical inputs always produce identical output.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .arith import (
    det,
    dot,
    fmt,
    inverse,
    mat_vec,
    orthogonal_complement_vector,
    primitive,
    rank_of,
    rat,
    solve,
    transpose,
    vec,
)
from .errors import (
    DegeneratePolytopeError,
    DimensionMismatchError,
    InvalidBasisError,
    NotReebFieldError,
    SingularSystemError,
    UnsupportedGeometryError,
)

MAX_RANK = 8


def _check_rank(rank: int):
    if not 1 <= rank <= MAX_RANK:
        raise UnsupportedGeometryError(f"rank {rank} outside supported range 1..{MAX_RANK}")


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------


def _dd_extreme_rays(normals, rank):
    """Extreme rays of {x : <a, x> >= 0 for a in normals}.

    Incremental refinement starting from a simplicial subcone; requires the
    result to be pointed, i.e. the normals to span the ambient space.
    """
    basis_idx, basis_rows = [], []
    for i, a in enumerate(normals):
        if rank_of(basis_rows + [a]) > len(basis_rows):
            basis_rows.append(a)
            basis_idx.append(i)
            if len(basis_rows) == rank:
                break
    if len(basis_rows) < rank:
        raise UnsupportedGeometryError("cone is not pointed (facet normals do not span)")

    rays = []
    active = []
    for j in range(rank):
        e = tuple(Fraction(int(i == j)) for i in range(rank))
        rays.append(primitive(solve(basis_rows, e)))
        active.append(frozenset(basis_idx[i] for i in range(rank) if i != j))

    processed = set(basis_idx)
    for idx, a in enumerate(normals):
        if idx in processed:
            continue
        vals = [dot(a, r) for r in rays]
        if all(v >= 0 for v in vals):
            active = [
                act | {idx} if v == 0 else act for act, v in zip(active, vals)
            ]
            processed.add(idx)
            continue
        keep_rays, keep_active = [], []
        for r, act, v in zip(rays, active, vals):
            if v > 0:
                keep_rays.append(r)
                keep_active.append(act)
            elif v == 0:
                keep_rays.append(r)
                keep_active.append(act | {idx})
        new = set()
        for (p, q) in itertools.combinations(range(len(rays)), 2):
            vp, vq = vals[p], vals[q]
            if vp * vq >= 0:
                continue
            shared = active[p] & active[q]
            adjacent = not any(
                k not in (p, q) and shared <= active[k] for k in range(len(rays))
            )
            if not adjacent:
                continue
            if vp < 0:
                p, q = q, p
                vp, vq = vq, vp
            new.add(primitive(tuple(vp * x - vq * y for x, y in zip(rays[q], rays[p]))))
        processed.add(idx)
        for w in sorted(new):
            if w not in keep_rays:
                keep_rays.append(w)
                # tightness must be recomputed: degenerate inputs can make
                # more processed constraints vanish at w than the pair shares
                keep_active.append(
                    frozenset(i for i in processed if dot(normals[i], w) == 0)
                )
        rays, active = keep_rays, keep_active

    order = sorted(range(len(rays)), key=lambda i: rays[i])
    return tuple(rays[i] for i in order)


@dataclass(frozen=True)
class Cone:
    """A pointed, full-dimensional rational cone.

    ``rays`` are the primitive extreme-ray generators and ``halfspaces`` the
    primitive inward facet normals; facet normals of a cone are exactly the
    extreme rays of its dual, so duality is an exchange of the two fields.
    """

    rank: int
    rays: tuple
    halfspaces: tuple
    lattice: str = "N"

    @staticmethod
    def from_rays(rays, rank=None, lattice="N") -> "Cone":
        rays = [primitive(vec(r)) for r in rays]
        if not rays:
            raise UnsupportedGeometryError("a cone needs at least one ray")
        n = rank if rank is not None else len(rays[0])
        _check_rank(n)
        if any(len(r) != n for r in rays):
            raise DimensionMismatchError("ray length does not match rank")
        if rank_of(rays) < n:
            raise UnsupportedGeometryError("cone is not full-dimensional")
        halfspaces = _dd_extreme_rays(sorted(set(rays)), n)
        if rank_of(halfspaces) < n:
            raise UnsupportedGeometryError("cone is not pointed")
        canonical = _dd_extreme_rays(halfspaces, n)
        return Cone(n, canonical, halfspaces, lattice)

    @staticmethod
    def from_halfspaces(halfspaces, rank=None, lattice="N") -> "Cone":
        normals = [primitive(vec(h)) for h in halfspaces]
        if not normals:
            raise UnsupportedGeometryError("a cone needs at least one halfspace")
        n = rank if rank is not None else len(normals[0])
        _check_rank(n)
        rays = _dd_extreme_rays(sorted(set(normals)), n)
        if rank_of(rays) < n:
            raise UnsupportedGeometryError("cone is not full-dimensional")
        canonical_normals = _dd_extreme_rays(rays, n)
        return Cone(n, rays, canonical_normals, lattice)

    def contains(self, v) -> bool:
        v = vec(v)
        return all(dot(h, v) >= 0 for h in self.halfspaces)

    def contains_interior(self, v) -> bool:
        v = vec(v)
        return all(dot(h, v) > 0 for h in self.halfspaces)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "lattice": self.lattice,
            "rays": [[fmt(Fraction(x)) for x in r] for r in self.rays],
            "halfspaces": [
                {"normal": [fmt(Fraction(x)) for x in h], "offset": "0"}
                for h in self.halfspaces
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "Cone":
        return Cone.from_rays(
            data["rays"], rank=data.get("rank"), lattice=data.get("lattice", "N")
        )


def dual_cone(c: Cone) -> Cone:
    """The dual cone; rays and facet normals swap roles exactly."""
    other = "M" if c.lattice == "N" else "N"
    return Cone(c.rank, c.halfspaces, c.rays, other)


# ---------------------------------------------------------------------------
# polytopes
# ---------------------------------------------------------------------------


def _normalize_halfspace(normal, offset):
    """Canonical (integer primitive normal, rational offset) with the same
    solution set; returns None for the trivial constraint 0 <= offset."""
    normal = [rat(x) for x in normal]
    offset = rat(offset)
    if all(x == 0 for x in normal):
        if offset < 0:
            return "empty"
        return None
    d = lcm(*(x.denominator for x in normal + [offset]))
    ints = [int(x * d) for x in normal]
    off = int(offset * d)
    g = gcd(*(abs(x) for x in ints), abs(off)) if off else gcd(*(abs(x) for x in ints))
    g = g or 1
    return tuple(x // g for x in ints), Fraction(off, g)


@dataclass(frozen=True)
class Polytope:
    """A bounded rational polytope with matching vertex and inequality data.

    ``halfspaces`` entries are pairs ``(normal, offset)`` meaning
    ``<normal, x> <= offset`` with primitive integer normals.  Lower
    dimensional bodies (slices, facets) are allowed; ``affine_dim`` records
    the dimension of the affine hull, -1 for the empty polytope.
    """

    rank: int
    vertices: tuple
    halfspaces: tuple
    affine_dim: int

    def contains(self, x) -> bool:
        x = vec(x)
        return all(dot(a, x) <= b for a, b in self.halfspaces)

    def scaled(self, c) -> "Polytope":
        c = rat(c)
        if c <= 0:
            raise ValueError("scale factor must be positive")
        return Polytope(
            self.rank,
            tuple(tuple(c * x for x in v) for v in self.vertices),
            tuple((a, c * b) for a, b in self.halfspaces),
            self.affine_dim,
        )

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "vertices": [[fmt(x) for x in v] for v in self.vertices],
            "halfspaces": [
                {"normal": [fmt(Fraction(x)) for x in a], "offset": fmt(b)}
                for a, b in self.halfspaces
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "Polytope":
        hs = [(h["normal"], h["offset"]) for h in data["halfspaces"]]
        p = polytope_from_halfspaces(data["rank"], hs)
        if "vertices" in data and data["vertices"]:
            given = sorted(vec(v) for v in data["vertices"])
            if given != sorted(p.vertices):
                raise UnsupportedGeometryError("vertex and halfspace data disagree")
        return p


def _affine_dim(vertices) -> int:
    if not vertices:
        return -1
    v0 = vertices[0]
    return rank_of([tuple(x - y for x, y in zip(v, v0)) for v in vertices[1:]])


def _vertex_enumeration(rank, halfspaces):
    """All basic feasible solutions of an inequality system (brute force
    over n-subsets; exact, fine for the small systems this tool handles)."""
    verts = set()
    k = len(halfspaces)
    for idx in itertools.combinations(range(k), rank):
        rows = [halfspaces[i][0] for i in idx]
        rhs = [halfspaces[i][1] for i in idx]
        try:
            x = solve(rows, rhs)
        except SingularSystemError:
            continue
        if all(dot(a, x) <= b for a, b in halfspaces):
            verts.add(tuple(x))
    return sorted(verts)


def _prune_facets(rank, vertices, halfspaces, affine_dim):
    if affine_dim < rank:
        return tuple(sorted(set(halfspaces)))
    kept = []
    for a, b in set(halfspaces):
        tight = [v for v in vertices if dot(a, v) == b]
        if len(tight) >= rank and _affine_dim(tight) == rank - 1:
            kept.append((a, b))
    return tuple(sorted(kept))


def polytope_from_halfspaces(rank, halfspaces, assume_bounded=False) -> Polytope:
    """Build a polytope from inequalities ``<normal, x> <= offset``."""
    _check_rank(rank)
    normed = []
    for normal, offset in halfspaces:
        h = _normalize_halfspace(normal, offset)
        if h == "empty":
            return Polytope(rank, (), (), -1)
        if h is not None:
            if len(h[0]) != rank:
                raise DimensionMismatchError("halfspace normal length does not match rank")
            normed.append(h)
    normed = sorted(set(normed))
    if not normed:
        raise UnsupportedGeometryError("empty inequality system describes all of space")
    if not assume_bounded:
        if rank_of([a for a, _ in normed]) < rank:
            raise UnsupportedGeometryError("inequality system is unbounded")
        recession = _dd_extreme_rays(sorted({tuple(-x for x in a) for a, _ in normed}), rank)
        if recession:
            raise UnsupportedGeometryError("inequality system is unbounded")
    vertices = _vertex_enumeration(rank, normed)
    dim = _affine_dim(vertices)
    if not vertices:
        return Polytope(rank, (), (), -1)
    return Polytope(rank, tuple(vertices), _prune_facets(rank, vertices, normed, dim), dim)


def polytope_from_vertices(points) -> Polytope:
    """Convex hull of a full-dimensional point set (exact brute-force hull)."""
    pts = sorted({vec(p) for p in points})
    if not pts:
        return Polytope(0, (), (), -1)
    n = len(pts[0])
    _check_rank(n)
    dim = _affine_dim(pts)
    if dim < n:
        raise DegeneratePolytopeError(dim)
    if n == 1:
        lo, hi = pts[0][0], pts[-1][0]
        hs = (((-1,), -lo), ((1,), hi))
        return Polytope(1, ((lo,), (hi,)), tuple(sorted(hs)), 1)
    facets = set()
    for idx in itertools.combinations(range(len(pts)), n):
        rows = [tuple(x - y for x, y in zip(pts[i], pts[idx[0]])) for i in idx[1:]]
        normal = orthogonal_complement_vector(rows)
        if all(x == 0 for x in normal):
            continue
        b = dot(normal, pts[idx[0]])
        values = [dot(normal, p) - b for p in pts]
        if all(v <= 0 for v in values):
            facets.add(_normalize_halfspace(normal, b))
        elif all(v >= 0 for v in values):
            facets.add(_normalize_halfspace(tuple(-x for x in normal), -b))
    facets = sorted(f for f in facets if f not in (None, "empty"))
    vertices = [
        p
        for p in pts
        if rank_of([a for a, b in facets if dot(a, p) == b]) == n
    ]
    return Polytope(n, tuple(vertices), _prune_facets(n, vertices, facets, n), n)


def check_consistency(p: Polytope, strict: bool = False) -> bool:
    """Cross-validate the vertex and inequality descriptions."""
    for v in p.vertices:
        if not all(dot(a, v) <= b for a, b in p.halfspaces):
            return False
    if p.affine_dim == p.rank:
        for a, b in p.halfspaces:
            tight = [v for v in p.vertices if dot(a, v) == b]
            if len(tight) < p.rank or _affine_dim(tight) != p.rank - 1:
                return False
        for v in p.vertices:
            if rank_of([a for a, b in p.halfspaces if dot(a, v) == b]) < p.rank:
                return False
    if strict:
        redone = _vertex_enumeration(p.rank, p.halfspaces)
        if tuple(redone) != tuple(sorted(p.vertices)):
            return False
    return True


# ---------------------------------------------------------------------------
# Reeb slices and the Okounkov body
# ---------------------------------------------------------------------------


def require_reeb(dual: Cone, xi) -> tuple:
    """Validate that xi pairs strictly positively with every ray of the
    weight cone; returns xi as an exact vector."""
    xi = vec(xi)
    if len(xi) != dual.rank:
        raise DimensionMismatchError("xi length does not match rank")
    for r in dual.rays:
        if dot(r, xi) <= 0:
            raise NotReebFieldError(
                f"xi pairs non-positively with weight-cone ray {list(r)}"
            )
    return xi


def reeb_slice(dual: Cone, xi):
    """The sub-level body Q = {u in the weight cone : <u, xi> <= 1} and its
    level-one slice P = {<u, xi> = 1}, both with exact vertex data."""
    xi = require_reeb(dual, xi)
    n = dual.rank
    scaled = sorted(tuple(Fraction(x) / dot(r, xi) for x in r) for r in dual.rays)
    cap_normal, cap_offset = _normalize_halfspace(xi, 1)
    q_halfspaces = [(tuple(-x for x in h), Fraction(0)) for h in dual.halfspaces]
    q_halfspaces.append((cap_normal, cap_offset))
    origin = tuple(Fraction(0) for _ in range(n))
    q = Polytope(
        n,
        tuple(sorted([origin] + scaled)),
        tuple(sorted(q_halfspaces)),
        n,
    )
    p_halfspaces = q_halfspaces + [(tuple(-x for x in cap_normal), -cap_offset)]
    p = Polytope(n, tuple(scaled), tuple(sorted(p_halfspaces)), n - 1 if n > 1 else 0)
    return q, p


def okounkov_body(dual: Cone, xi, basis) -> Polytope:
    """Image of the sub-level body under u -> (<u, e_1>, ..., <u, e_n>) for a
    determinant-one basis {e_i} contained in the cone dual to the weights."""
    rows = tuple(vec(r) for r in basis)
    n = dual.rank
    if len(rows) != n or any(len(r) != n for r in rows):
        raise InvalidBasisError("basis must be a square rank-sized matrix")
    if det(rows) != 1:
        raise InvalidBasisError("basis determinant must be exactly 1")
    for i, e in enumerate(rows):
        if not all(dot(u, e) >= 0 for u in dual.rays):
            raise InvalidBasisError(f"basis vector {i} lies outside the cone")
    q, _ = reeb_slice(dual, xi)
    vertices = tuple(sorted(mat_vec(rows, v) for v in q.vertices))
    inv_t = transpose(inverse(rows))
    halfspaces = []
    for a, b in q.halfspaces:
        halfspaces.append(_normalize_halfspace(mat_vec(inv_t, vec(a)), b))
    return Polytope(n, vertices, tuple(sorted(halfspaces)), n)


# ---------------------------------------------------------------------------
# triangulation and volume
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Triangulation:
    """Vertex-index simplices covering a polytope with disjoint interiors."""

    simplices: tuple


def _pulling(points):
    """Pulling triangulation of a full-dimensional point set; returns
    simplices as tuples of points.  Deterministic: anchored at the
    lexicographically smallest vertex at every level."""
    d = len(points[0])
    if d == 1:
        lo = min(points)
        hi = max(points)
        return [(lo, hi)]
    p = polytope_from_vertices(points)
    vs = p.vertices
    if len(vs) == d + 1:
        return [tuple(vs)]
    anchor = vs[0]
    simplices = []
    for a, b in p.halfspaces:
        if dot(a, anchor) == b:
            continue
        tight = [v for v in vs if dot(a, v) == b]
        j = min(i for i, x in enumerate(a) if x != 0)
        proj = [v[:j] + v[j + 1 :] for v in tight]
        back = {pr: v for pr, v in zip(proj, tight)}
        for s in _pulling(proj):
            simplices.append((anchor,) + tuple(back[pt] for pt in s))
    return simplices


def triangulate(p: Polytope) -> Triangulation:
    """Deterministic triangulation of a full-dimensional polytope; simplex
    volumes add up to the volume of the whole body."""
    if p.affine_dim < p.rank:
        raise DegeneratePolytopeError(p.affine_dim)
    index = {v: i for i, v in enumerate(p.vertices)}
    simplices = []
    for s in _pulling(list(p.vertices)):
        simplices.append(tuple(sorted(index[v] for v in s)))
    return Triangulation(tuple(sorted(simplices)))


def simplex_volume(points) -> Fraction:
    v0 = points[0]
    rows = [tuple(x - y for x, y in zip(v, v0)) for v in points[1:]]
    d = det(rows)
    n = len(rows)
    fact = 1
    for i in range(2, n + 1):
        fact *= i
    return abs(d) / fact


def volume(p: Polytope) -> Fraction:
    """Exact Lebesgue volume; zero for degenerate bodies."""
    if p.affine_dim < p.rank:
        return Fraction(0)
    total = Fraction(0)
    for s in triangulate(p).simplices:
        total += simplex_volume([p.vertices[i] for i in s])
    return total


# ---------------------------------------------------------------------------
# charts for codimension-one slices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FacetChart:
    """Affine chart for a polytope lying in a single hyperplane
    <normal, u> = offset: drop one coordinate and lift back exactly."""

    normal: tuple
    offset: Fraction
    drop: int
    body: Polytope  # the projected, full-dimensional polytope

    def project(self, u):
        return u[: self.drop] + u[self.drop + 1 :]

    def lift(self, y):
        partial = sum(
            c * y[i if i < self.drop else i - 1]
            for i, c in enumerate(self.normal)
            if i != self.drop
        )
        uj = (self.offset - partial) / self.normal[self.drop]
        return y[: self.drop] + (uj,) + y[self.drop :]


def facet_chart(p: Polytope) -> FacetChart:
    """Chart for a polytope whose affine hull is a hyperplane."""
    if p.rank < 2 or p.affine_dim != p.rank - 1:
        raise DegeneratePolytopeError(p.affine_dim, "chart requires a codimension-one body")
    v0 = p.vertices[0]
    diffs = []
    for v in p.vertices[1:]:
        d = tuple(x - y for x, y in zip(v, v0))
        if rank_of(diffs + [d]) > len(diffs):
            diffs.append(d)
        if len(diffs) == p.rank - 1:
            break
    normal = orthogonal_complement_vector(diffs)
    offset = dot(normal, v0)
    j = min(i for i, x in enumerate(normal) if x != 0)
    proj = [v[:j] + v[j + 1 :] for v in p.vertices]
    body = polytope_from_vertices(proj)
    return FacetChart(tuple(Fraction(x) for x in normal), offset, j, body)
