"""Gravitational n-body dynamics on surfaces of constant negative curvature.

The package models n point masses attracting through the cotangent-of-
distance potential on the hyperbolic plane of curvature -1/R**2, offered
in three interchangeable charts: the Poincare disk, the upper half plane,
and the hyperboloid sheet embedded in Minkowski 3-space.

Layout:

- ``geometry``:   charts, conversions, distances, geodesic flow
- ``dynamics``:   bodies, configurations, potential, forces, accelerations
- ``invariants``: energy and the three momentum-type first integrals
- ``integrator``: adaptive Runge-Kutta propagation with invariant tracking
- ``isometries``: one-parameter Mobius subgroups (elliptic / hyperbolic /
  parabolic) and their Killing fields
- ``relequil``:   relative-equilibrium solvers, residual verifiers, and
  nonexistence certificates
- ``cli``:        the ``curvednb`` command-line front end
"""

from .errors import (
    BoundaryEscapeError,
    ChartDomainError,
    InfeasibleError,
    ProjectiveInfinityError,
    SingularityError,
)
from .geometry import (
    Chart,
    CurvatureContext,
    DiskPoint,
    HalfPlanePoint,
    HyperboloidPoint,
    convert_point,
    geodesic_distance,
    geodesic_flow,
    transport_state,
)
from .dynamics import (
    Body,
    Configuration,
    acceleration,
    accelerations,
    grad_potential_disk,
    grad_potential_halfplane,
    potential,
    transport_configuration,
)
from .invariants import FirstIntegrals, drift_report, first_integrals
from .integrator import (
    ESCAPE_MARGIN_FACTOR,
    TERM_COLLISION,
    TERM_COMPLETED,
    TERM_ESCAPE,
    IntegratorSettings,
    Trajectory,
    defect,
    integrate,
)
from .isometries import (
    MatrixFlavor,
    SubgroupKind,
    SubgroupTag,
    UnitDetMatrix2,
    mobius_apply,
    orbit,
    subgroup_matrix,
)
from .relequil import (
    Feasibility,
    LagrangeSolution,
    ParabolicCertificate,
    REClass,
    REFamily,
    REFamilyTag,
    ResidualReport,
    SweepReport,
    TwoBodyHyperbolicSolution,
    elliptic_pair_family,
    elliptic_residual,
    euler_elliptic_three,
    hyperbolic_no_go_sweep,
    hyperbolic_residual,
    lagrange_elliptic_three,
    parabolic_nonexistence_certificate,
    parabolic_residual,
    re_trajectory,
    solve_two_body_elliptic,
    solve_two_body_hyperbolic,
    solve_three_body_hyperbolic,
    three_body_hyperbolic_family,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryEscapeError",
    "ChartDomainError",
    "InfeasibleError",
    "ProjectiveInfinityError",
    "SingularityError",
    "Chart",
    "CurvatureContext",
    "DiskPoint",
    "HalfPlanePoint",
    "HyperboloidPoint",
    "convert_point",
    "geodesic_distance",
    "geodesic_flow",
    "transport_state",
    "Body",
    "Configuration",
    "acceleration",
    "accelerations",
    "grad_potential_disk",
    "grad_potential_halfplane",
    "potential",
    "transport_configuration",
    "FirstIntegrals",
    "drift_report",
    "first_integrals",
    "ESCAPE_MARGIN_FACTOR",
    "TERM_COLLISION",
    "TERM_COMPLETED",
    "TERM_ESCAPE",
    "IntegratorSettings",
    "Trajectory",
    "defect",
    "integrate",
    "MatrixFlavor",
    "SubgroupKind",
    "SubgroupTag",
    "UnitDetMatrix2",
    "mobius_apply",
    "orbit",
    "subgroup_matrix",
    "Feasibility",
    "LagrangeSolution",
    "ParabolicCertificate",
    "REClass",
    "REFamily",
    "REFamilyTag",
    "ResidualReport",
    "SweepReport",
    "TwoBodyHyperbolicSolution",
    "elliptic_pair_family",
    "elliptic_residual",
    "euler_elliptic_three",
    "hyperbolic_no_go_sweep",
    "hyperbolic_residual",
    "lagrange_elliptic_three",
    "parabolic_nonexistence_certificate",
    "parabolic_residual",
    "re_trajectory",
    "solve_two_body_elliptic",
    "solve_two_body_hyperbolic",
    "solve_three_body_hyperbolic",
    "three_body_hyperbolic_family",
    "__version__",
]
