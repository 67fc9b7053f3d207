"""Concave piecewise-linear functions given as minima of affine forms.

These model monomial filtrations on the weight cone: the function value at
a weight u is min over branches of <u, linear> + constant.  Exact
integration over polytopes goes through the linearity subdivision and the
closed form for powers of an affine function over a simplex; superlevel
set volumes are recovered as exact polynomial splines in the level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import dot, fmt, rat, vec
from .errors import (
    DegeneratePolytopeError,
    DimensionMismatchError,
    InvalidFiltrationError,
    UnsupportedDegreeError,
)
from .polyhedra import (
    FacetChart,
    Polytope,
    facet_chart,
    polytope_from_halfspaces,
    simplex_volume,
    triangulate,
    volume,
)

MAX_MOMENT_DEGREE = 4


@dataclass(frozen=True)
class AffineForm:
    """One branch <u, linear> + constant."""

    linear: tuple
    constant: Fraction

    @staticmethod
    def make(linear, constant=0) -> "AffineForm":
        return AffineForm(vec(linear), rat(constant))

    def value(self, u):
        return dot(self.linear, u) + self.constant

    def to_json(self) -> dict:
        return {"linear": [fmt(x) for x in self.linear], "constant": fmt(self.constant)}


@dataclass(frozen=True)
class PLConcave:
    """A finite minimum of affine forms (structurally concave)."""

    branches: tuple

    @staticmethod
    def make(branches) -> "PLConcave":
        out = []
        for b in branches:
            if isinstance(b, AffineForm):
                out.append(AffineForm(vec(b.linear), rat(b.constant)))
            else:
                linear, constant = b
                out.append(AffineForm.make(linear, constant))
        if not out:
            raise InvalidFiltrationError("a filtration needs at least one branch")
        rank = len(out[0].linear)
        if any(len(b.linear) != rank for b in out):
            raise DimensionMismatchError("branches have mixed ranks")
        dedup = sorted(set((b.linear, b.constant) for b in out))
        return PLConcave(tuple(AffineForm(l, c) for l, c in dedup))

    @property
    def rank(self) -> int:
        return len(self.branches[0].linear)

    def value(self, u):
        return min(b.value(u) for b in self.branches)

    def is_homogeneous(self) -> bool:
        return all(b.constant == 0 for b in self.branches)

    def shifted(self, c) -> "PLConcave":
        c = rat(c)
        return PLConcave.make([(b.linear, b.constant + c) for b in self.branches])

    def scaled(self, c) -> "PLConcave":
        c = rat(c)
        if c <= 0:
            raise InvalidFiltrationError("filtrations scale by positive rationals only")
        return PLConcave.make([(tuple(c * x for x in b.linear), c * b.constant) for b in self.branches])

    def to_json(self) -> dict:
        return {"branches": [b.to_json() for b in self.branches]}

    @staticmethod
    def from_json(data: dict) -> "PLConcave":
        return PLConcave.make(
            [(b["linear"], b.get("constant", "0")) for b in data["branches"]]
        )


def linear_form(direction) -> PLConcave:
    """The single-branch filtration u -> <u, direction>."""
    return PLConcave.make([(direction, 0)])


def evaluate(f: PLConcave, u) -> Fraction:
    u = vec(u)
    if len(u) != f.rank:
        raise DimensionMismatchError("point rank does not match the filtration")
    return f.value(u)


def homogenize(f: PLConcave, dual=None) -> PLConcave:
    """Drop the additive constants; equals the pointwise limit of f(m*u)/m.

    When the weight cone is supplied, nonnegativity of the homogenized
    branches is validated on its rays (negative growth along a ray means
    the input is not a filtration).
    """
    if dual is not None:
        for r in dual.rays:
            if min(dot(b.linear, r) for b in f.branches) < 0:
                raise InvalidFiltrationError(
                    f"filtration decays along weight-cone ray {list(r)}"
                )
    return PLConcave.make([(b.linear, 0) for b in f.branches])


def validate_nonnegative(f: PLConcave, dual, q: Polytope):
    """Filtration admissibility: nonnegative on the whole weight cone.

    Checked exactly at the vertices of the sub-level body and, for the
    homogenized branches, at the rays; by concavity this is sufficient.
    """
    homogenize(f, dual)
    for v in q.vertices:
        if f.value(v) < 0:
            raise InvalidFiltrationError(
                f"filtration is negative at sub-level vertex {[fmt(x) for x in v]}"
            )


def linearity_subdivision(f: PLConcave, p: Polytope):
    """Cells of p on which a single branch attains the minimum.

    Returns (cell, branch) pairs for the full-dimensional cells only; their
    volumes add up to the volume of p.
    """
    if p.affine_dim < p.rank:
        raise DegeneratePolytopeError(p.affine_dim)
    cells = []
    for i, b in enumerate(f.branches):
        halfspaces = list(p.halfspaces)
        for j, other in enumerate(f.branches):
            if i == j:
                continue
            normal = tuple(x - y for x, y in zip(b.linear, other.linear))
            halfspaces.append((normal, other.constant - b.constant))
        cell = polytope_from_halfspaces(p.rank, halfspaces, assume_bounded=True)
        if cell.affine_dim == p.rank:
            cells.append((cell, b))
    return tuple(cells)


def _complete_homogeneous(values, k):
    """Complete homogeneous symmetric polynomial h_k of the given values."""
    h = [Fraction(1)] + [Fraction(0)] * k
    for v in values:
        for d in range(1, k + 1):
            h[d] += v * h[d - 1]
    return h[k]


def _simplex_moment(points, form: AffineForm, k):
    """Exact integral of (affine form)^k over a simplex: the volume times
    k! n!/(n+k)! times h_k of the vertex values."""
    n = len(points) - 1
    vol = simplex_volume(points)
    if vol == 0:
        return Fraction(0)
    values = [form.value(v) for v in points]
    coef = Fraction(math.factorial(k) * math.factorial(n), math.factorial(n + k))
    return vol * coef * _complete_homogeneous(values, k)


def integrate_moment(f: PLConcave, p: Polytope, k: int) -> Fraction:
    """Exact integral of f^k over p, through the linearity subdivision."""
    if k < 0 or k > MAX_MOMENT_DEGREE:
        raise UnsupportedDegreeError(f"moment degree {k} unsupported (max {MAX_MOMENT_DEGREE})")
    if k == 0:
        return volume(p)
    if p.affine_dim < p.rank:
        return Fraction(0)
    total = Fraction(0)
    for cell, branch in linearity_subdivision(f, p):
        for s in triangulate(cell).simplices:
            total += _simplex_moment([cell.vertices[i] for i in s], branch, k)
    return total


# ---------------------------------------------------------------------------
# superlevel profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SuperlevelProfile:
    """Exact t -> vol({u in the body : f(u) >= t}).

    ``polys[i]`` holds ascending-degree coefficients valid on the open
    interval (breakpoints[i], breakpoints[i+1]); ``values_at[i]`` is the
    exact volume at the breakpoint itself (profiles may jump where a level
    set has positive volume).  Beyond the last breakpoint the profile is 0.
    """

    breakpoints: tuple
    polys: tuple
    values_at: tuple

    @property
    def total(self) -> Fraction:
        return self.values_at[0] if self.values_at else Fraction(0)

    def _poly_value(self, i, t):
        acc = Fraction(0)
        for c in reversed(self.polys[i]):
            acc = acc * t + c
        return acc

    def value(self, t) -> Fraction:
        """vol{f >= t} exactly, any rational t."""
        t = rat(t)
        if not self.breakpoints or t > self.breakpoints[-1]:
            return Fraction(0)
        if t <= self.breakpoints[0]:
            return self.total if t < self.breakpoints[0] else self.values_at[0]
        for i in range(len(self.breakpoints) - 1):
            if self.breakpoints[i] < t < self.breakpoints[i + 1]:
                return self._poly_value(i, t)
        return self.values_at[self.breakpoints.index(t)]

    def right_limit(self, t) -> Fraction:
        t = rat(t)
        if not self.breakpoints or t >= self.breakpoints[-1]:
            return Fraction(0)
        if t < self.breakpoints[0]:
            return self.total
        for i in range(len(self.breakpoints) - 1):
            if self.breakpoints[i] <= t < self.breakpoints[i + 1]:
                return self._poly_value(i, t)
        raise AssertionError("unreachable")

    def cdf(self, t) -> Fraction:
        """Right-continuous distribution function of the pushforward measure:
        total mass minus the strict superlevel volume."""
        return self.total - self.right_limit(t)

    def integral(self) -> Fraction:
        """Exact integral of the profile over [0, infinity)."""
        acc = Fraction(0)
        for i in range(len(self.breakpoints) - 1):
            a, b = self.breakpoints[i], self.breakpoints[i + 1]
            for d, c in enumerate(self.polys[i]):
                acc += c * (b ** (d + 1) - a ** (d + 1)) / (d + 1)
        return acc

    def csv_rows(self, degree=None):
        deg = degree if degree is not None else max(
            (len(q) for q in self.polys), default=1
        )
        rows = []
        for i, t in enumerate(self.breakpoints[:-1]):
            coeffs = list(self.polys[i]) + [Fraction(0)] * (deg - len(self.polys[i]))
            rows.append([fmt(t)] + [fmt(c) for c in coeffs])
        if self.breakpoints:
            rows.append([fmt(self.breakpoints[-1])] + [fmt(Fraction(0))] * deg)
        return rows


def _superlevel_body(f: PLConcave, delta: Polytope, t) -> Polytope:
    halfspaces = list(delta.halfspaces)
    for b in f.branches:
        halfspaces.append((tuple(-x for x in b.linear), b.constant - t))
    return polytope_from_halfspaces(delta.rank, halfspaces, assume_bounded=True)


def _lagrange(points):
    """Exact interpolating polynomial (ascending coefficients) through
    rational (x, y) points."""
    k = len(points)
    coeffs = [Fraction(0)] * k
    for i, (xi, yi) in enumerate(points):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if i == j:
                continue
            # multiply basis by (x - xj)
            nxt = [Fraction(0)] * (len(basis) + 1)
            for d, c in enumerate(basis):
                nxt[d] += c * (-xj)
                nxt[d + 1] += c
            basis = nxt
            denom *= xi - xj
        scale = yi / denom
        for d, c in enumerate(basis):
            coeffs[d] += scale * c
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def superlevel_profile(f: PLConcave, delta: Polytope) -> SuperlevelProfile:
    """Exact piecewise-polynomial superlevel-volume profile of f on delta.

    Between consecutive critical levels the volume is a polynomial of
    degree at most the dimension; each piece is recovered by exact
    interpolation at interior rational nodes.
    """
    if delta.affine_dim < delta.rank:
        raise DegeneratePolytopeError(delta.affine_dim)
    low = min(f.value(v) for v in delta.vertices)
    if low < 0:
        raise InvalidFiltrationError("function is negative on the body")
    n = delta.rank
    critical = {Fraction(0)}
    for cell, _ in linearity_subdivision(f, delta):
        for v in cell.vertices:
            critical.add(f.value(v))
    breakpoints = tuple(sorted(critical))
    polys = []
    for i in range(len(breakpoints) - 1):
        a, b = breakpoints[i], breakpoints[i + 1]
        nodes = []
        for j in range(1, n + 2):
            t = a + (b - a) * Fraction(j, n + 2)
            nodes.append((t, volume(_superlevel_body(f, delta, t))))
        polys.append(_lagrange(nodes))
    values_at = tuple(volume(_superlevel_body(f, delta, t)) for t in breakpoints)
    return SuperlevelProfile(breakpoints, tuple(polys), values_at)


# ---------------------------------------------------------------------------
# maxima and the Legendre transform
# ---------------------------------------------------------------------------


def restrict_to_chart(f: PLConcave, chart: FacetChart) -> PLConcave:
    """The function composed with the chart's lift, as a PL function of the
    chart coordinates."""
    branches = []
    aj = chart.normal[chart.drop]
    for b in f.branches:
        lj = b.linear[chart.drop]
        coeffs = []
        for i, c in enumerate(b.linear):
            if i == chart.drop:
                continue
            coeffs.append(c - lj * chart.normal[i] / aj)
        const = b.constant + lj * chart.offset / aj
        branches.append((tuple(coeffs), const))
    return PLConcave.make(branches)


def max_over(f: PLConcave, p: Polytope) -> Fraction:
    """Exact maximum of a concave PL function over a polytope (attained at a
    vertex of the linearity subdivision)."""
    if p.affine_dim == p.rank:
        best = None
        for cell, branch in linearity_subdivision(f, p):
            for v in cell.vertices:
                val = branch.value(v)
                if best is None or val > best:
                    best = val
        return best
    if p.affine_dim == p.rank - 1 and p.rank >= 2:
        chart = facet_chart(p)
        return max_over(restrict_to_chart(f, chart), chart.body)
    if p.affine_dim == 0:
        return f.value(p.vertices[0])
    raise DegeneratePolytopeError(p.affine_dim, "maximum needs a chart for this body")


def legendre(f: PLConcave, p: Polytope, v) -> Fraction:
    """Legendre-type transform value max_u (f(u) - <u, v>) over p.

    Fixed convention: the pairing is subtracted from the function; the
    opposite sign (f(u) + <u, v>) is not used anywhere in this package.
    """
    v = vec(v)
    if len(v) != f.rank:
        raise DimensionMismatchError("direction rank does not match the filtration")
    shifted = PLConcave.make(
        [(tuple(x - y for x, y in zip(b.linear, v)), b.constant) for b in f.branches]
    )
    return max_over(shifted, p)
