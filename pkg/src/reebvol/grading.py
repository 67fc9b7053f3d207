"""Truncated weight spaces and jumping-number statistics.

A graded setup couples a weight cone in the character lattice, a
polarization vector pairing positively with it, and a piecewise-linear
filtration.  The spectrum at level m is the multiset of filtration values
over the lattice points of the m-fold dilated sub-level body; averages,
tops, empirical measures, and per-degree statistics all derive from it.

Two evaluation conventions are supported: the exact rational values
(default) and an integer-rounding mode for filtrations that only see
integer levels, which replaces each value by its floor.  An opt-in clamp
replaces values by max(value, 0) for inputs that fail the nonnegativity
requirement; this leaves the standard admissibility axioms and is never
the default.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import lattice
from .arith import vec
from .errors import DimensionMismatchError, EmptyDegreeError, QuasiRegularRequiredError
from .plconcave import PLConcave, homogenize, max_over, validate_nonnegative
from .polyhedra import Cone, reeb_slice


class GradedSetup:
    """Weight cone + polarization + filtration, with derived slice bodies."""

    def __init__(self, dual: Cone, xi, psi: PLConcave, ceiling=False, clamp=False, jobs=1):
        self.dual = dual
        self.xi = vec(xi)
        if psi.rank != dual.rank:
            raise DimensionMismatchError("filtration rank does not match the weight cone")
        self.psi = psi
        self.ceiling = bool(ceiling)
        self.clamp = bool(clamp)
        self.jobs = max(1, int(jobs))
        self.q, self.p = reeb_slice(dual, self.xi)
        if not clamp:
            validate_nonnegative(psi, dual, self.q)
        self.psi_tilde = homogenize(psi)
        self._branches = lattice.BranchData.from_plconcave(psi)

    @property
    def rank(self) -> int:
        return self.dual.rank

    def with_xi(self, xi) -> "GradedSetup":
        return GradedSetup(self.dual, xi, self.psi, self.ceiling, self.clamp, self.jobs)

    def value(self, u) -> Fraction:
        v = self.psi.value(vec(u))
        if self.clamp:
            v = max(v, Fraction(0))
        if self.ceiling:
            v = Fraction(v.__floor__())
        return v


@dataclass(frozen=True)
class JumpingSpectrum:
    """The nondecreasing multiset of filtration values at level m."""

    m: int
    values: tuple

    @property
    def n_m(self) -> int:
        return len(self.values)


def lattice_count(g: GradedSetup, m: int) -> int:
    return lattice.count_points(g.q, m, jobs=g.jobs)


def jumping_spectrum(g: GradedSetup, m: int) -> JumpingSpectrum:
    """Values of the filtration over the level-m lattice points, sorted."""
    values = sorted(g.value(u) for u in lattice.iter_points(g.q, m))
    return JumpingSpectrum(m, tuple(values))


def spectrum_histogram(g: GradedSetup, m: int):
    """Sorted (value, multiplicity) pairs of the level-m spectrum."""
    hist = lattice.value_histogram(
        g.q, m, g._branches, floor_mode=g.ceiling, clamp=g.clamp, jobs=g.jobs
    )
    d = 1 if g.ceiling else g._branches.denom
    return tuple((Fraction(k, d), c) for k, c in sorted(hist.items()))


def s_m(g: GradedSetup, m: int) -> Fraction:
    """The normalized average of the level-m spectrum."""
    if m < 1:
        raise ValueError("level must be at least 1")
    n_m = lattice_count(g, m)
    total = lattice.sum_values(
        g.q, m, g._branches, floor_mode=g.ceiling, clamp=g.clamp
    )
    return total / (m * n_m)


def t_m(g: GradedSetup, m: int) -> Fraction:
    """Largest spectrum value at level m, divided by m."""
    if m < 1:
        raise ValueError("level must be at least 1")
    top = lattice.max_value(g.q, m, g._branches, floor_mode=g.ceiling, clamp=g.clamp)
    return top / m


def big_t_estimate(g: GradedSetup, m_max: int) -> Fraction:
    """sup of t_m over 1 <= m <= m_max."""
    return max(t_m(g, m) for m in range(1, m_max + 1))


def t_limit(g: GradedSetup) -> Fraction:
    """Exact limit of t_m: the maximum of the homogenized filtration over
    the sub-level body."""
    top = max_over(g.psi_tilde, g.q)
    if g.clamp:
        top = max(top, Fraction(0))
    return top


def mu_m_cdf(g: GradedSetup, m: int):
    """Right-continuous CDF of the level-m empirical measure: sorted
    (value, cumulative mass) pairs; total mass nm/m^rank."""
    if m < 1:
        raise ValueError("level must be at least 1")
    scale = Fraction(1, m ** g.rank)
    out = []
    acc = Fraction(0)
    for value, mult in spectrum_histogram(g, m):
        acc += mult * scale
        out.append((value / m, acc))
    return tuple(out)


def spectrum_csv_rows(g: GradedSetup, m: int, decimal_digits=None):
    """Spectrum histogram as CSV rows (value, multiplicity[, decimal])."""
    from .arith import decimal_str, fmt

    rows = []
    for value, mult in spectrum_histogram(g, m):
        row = [fmt(value), str(mult)]
        if decimal_digits is not None:
            row.append(decimal_str(value, decimal_digits))
        rows.append(row)
    return rows


def cdf_csv_rows(cdf, decimal_digits=None):
    """An empirical CDF as CSV rows (value, cumulative mass[, decimals])."""
    from .arith import decimal_str, fmt

    rows = []
    for value, cum in cdf:
        row = [fmt(value), fmt(cum)]
        if decimal_digits is not None:
            row.extend([decimal_str(value, decimal_digits), decimal_str(cum, decimal_digits)])
        rows.append(row)
    return rows


def graded_s_tilde(g: GradedSetup, t: int) -> Fraction:
    """Per-degree average of filtration values on the weight level <u, xi> = t
    (integral polarization only)."""
    _require_integral(g)
    points = list(lattice.points_on_level(g.dual, g.xi, t))
    if not points:
        raise EmptyDegreeError(f"no weights of degree {t}")
    total = sum(g.value(u) for u in points)
    return Fraction(total) / (t * len(points))


def degree_count(g: GradedSetup, t: int) -> int:
    _require_integral(g)
    return sum(1 for _ in lattice.points_on_level(g.dual, g.xi, t))


def _require_integral(g: GradedSetup):
    if any(x.denominator != 1 for x in g.xi):
        raise QuasiRegularRequiredError(
            "per-degree statistics require an integral polarization vector"
        )
