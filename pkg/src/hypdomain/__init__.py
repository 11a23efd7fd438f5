"""Hyperbolic geometry of multiply connected plane domains.

Hyperbolic densities, meridians, circular-slit annulus maps and
Caratheodory convergence of pointed domain sequences.
"""
from .canonical import (
    CanonicalMap,
    LambdaVector,
    SlitAnnulusMap,
    eccentric_annulus_lambda,
    eval_forward,
    eval_inverse,
    modulus_annulus,
    solve_canonical_map,
    standard_domain,
)
from .caratheodory import (
    ConvergenceReport,
    DomainSequence,
    Kernel,
    Singleton,
    Tolerances,
    basepoint_shift_check,
    canonical_convergence_suite,
    check_convergence,
    geodesic_convergence_suite,
    hausdorff_kernel,
    meridian_bounds_suite,
    meridian_trend,
)
from .domain import (
    ClosedCurve,
    Component,
    Domain,
    Separation,
    annulus_domain,
    boundary_distance,
    disc_domain,
    enumerate_separations,
    load_domain,
    principal_count,
    save_domain,
    separation_count,
    validate_domain,
    winding_signature,
)
from .exceptions import *  # noqa: F401,F403
from .geodesic import (
    Meridian,
    MeridianFinder,
    extended_system,
    find_meridian,
    principal_system,
    shorten_in_class,
    system_metrics,
)
from .hypmetric import (
    HyperbolicDensity,
    MetricField,
    boundary_sandwich,
    hyp_dist_point_to_set,
    hyp_length,
    solve_density,
)
from .report import emit_report
from .scenarios import REGISTRY, RunReport, Scenario, run_scenario
from .sphere import INF, MobiusMap, hausdorff_dist, sph_dist

__version__ = "0.1.0"
