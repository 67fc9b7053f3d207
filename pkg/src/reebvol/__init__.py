"""Exact invariants of piecewise-linear filtrations on polarized toric cones.

The package computes, in exact rational arithmetic, the volume of a
polarization, jumping-number spectra of monomial filtrations, their
normalized averages and limit, and two normalizations of the associated
energy functional, cross-validating every quantity along independent
routes (lattice sums, body integrals, closed forms, slice integrals).
"""

from .arith import det, dot, fmt, rat, solve, vec
from .errors import (
    DegeneratePolytopeError,
    DimensionMismatchError,
    EmptyDegreeError,
    InvalidBasisError,
    InvalidDirectionError,
    InvalidFiltrationError,
    MathError,
    NotReebFieldError,
    QuasiRegularRequiredError,
    ReebvolError,
    SingularSystemError,
    SpecError,
    UnsupportedDegreeError,
    UnsupportedGeometryError,
)
from .grading import (
    GradedSetup,
    JumpingSpectrum,
    big_t_estimate,
    cdf_csv_rows,
    graded_s_tilde,
    jumping_spectrum,
    mu_m_cdf,
    s_m,
    spectrum_csv_rows,
    spectrum_histogram,
    t_limit,
    t_m,
)
from .lattice import count_points, iter_points, points_on_level
from .invariants import (
    InvariantReport,
    PolarizedToricSetup,
    Verdict,
    cdf_sup_distance,
    consistency_report,
    continuity_scan,
    d_vol,
    energy_pxi,
    energy_tc,
    homogeneity_check,
    mu_limit_cdf,
    quasi_regular_check,
    s_exact,
    s_monotonicity_probe,
    transform_setup,
    vol_xi,
)
from .plconcave import (
    AffineForm,
    PLConcave,
    SuperlevelProfile,
    evaluate,
    homogenize,
    integrate_moment,
    legendre,
    linear_form,
    linearity_subdivision,
    superlevel_profile,
)
from .polyhedra import (
    Cone,
    Polytope,
    Triangulation,
    dual_cone,
    okounkov_body,
    polytope_from_halfspaces,
    polytope_from_vertices,
    reeb_slice,
    triangulate,
    volume,
)
from .problem import ProblemSpec, parse_spec

__version__ = "0.1.0"
