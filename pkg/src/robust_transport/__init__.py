"""Transport network design under uncertain damage.

A shipping network is built once, at a concave cost of its capacities, and
then faces a weighted family of damage scenarios; in each scenario the
surviving capacities carry a recovery flow that earns reward at the mass it
still delivers.  The package scores both competitor classes for this game
(edge capacities with per-scenario flows, and weighted route plans with
per-scenario sub-plans), runs descent solvers for each, cross-checks them
against exhaustive oracles on small instances, and ships example families
exhibiting the characteristic phenomena: optima that need unoriented
capacities, optimal plans that skip arbitrarily close to a damaged wall,
negative total energy at finite mass, and energy decreasing along a
sequence of plans whose mass diverges.
"""

from .decomposition import (
    Decomposition,
    check_decomposition_identities,
    good_decomposition,
    remove_cycles,
)
from .energy import (
    EnergyBreakdown,
    eulerian_energy,
    lagrangian_energy,
    multiplicity,
    payoff_upper_bound,
    penalized_weights,
    phi_mass_eulerian,
    phi_mass_traffic,
)
from .examples import (
    EXAMPLES,
    ExampleParams,
    PhenomenonReport,
    build_example,
    verify_phenomenon,
    wall_profile,
)
from .figures import render_svg
from .model import (
    FORMAT_VERSION,
    AdmissibilityReport,
    BoundaryMeasure,
    CostSpec,
    DamageScenario,
    Edge,
    EulerianCompetitor,
    GeometricGraph,
    Instance,
    LagrangianCompetitor,
    ModelError,
    ParseError,
    Path,
    PayoffSpec,
    ValidationError,
    ValidationReport,
    Vertex,
    check_eulerian_admissible,
    check_lagrangian_admissible,
    dumps_report,
    empty_eulerian,
    empty_lagrangian,
    load_competitor,
    load_instance,
    preceq,
    serialize_competitor,
    serialize_instance,
    validate_instance,
)
from .recovery import RecoveryResult, independent_optimum, max_payoff_flow
from .solver import (
    OracleResult,
    SizeGuardError,
    SolveParams,
    SolveReport,
    brute_force_eulerian,
    brute_force_lagrangian,
    k_shortest_paths,
    oriented_consistent,
    path_dictionary,
    solve,
    solve_eulerian,
    solve_lagrangian,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "BoundaryMeasure",
    "CostSpec",
    "DamageScenario",
    "Decomposition",
    "EXAMPLES",
    "Edge",
    "EnergyBreakdown",
    "EulerianCompetitor",
    "ExampleParams",
    "FORMAT_VERSION",
    "GeometricGraph",
    "Instance",
    "LagrangianCompetitor",
    "ModelError",
    "OracleResult",
    "ParseError",
    "Path",
    "PayoffSpec",
    "PhenomenonReport",
    "RecoveryResult",
    "SizeGuardError",
    "SolveParams",
    "SolveReport",
    "ValidationError",
    "ValidationReport",
    "Vertex",
    "brute_force_eulerian",
    "brute_force_lagrangian",
    "build_example",
    "check_decomposition_identities",
    "check_eulerian_admissible",
    "check_lagrangian_admissible",
    "dumps_report",
    "empty_eulerian",
    "empty_lagrangian",
    "eulerian_energy",
    "good_decomposition",
    "independent_optimum",
    "k_shortest_paths",
    "lagrangian_energy",
    "load_competitor",
    "load_instance",
    "max_payoff_flow",
    "multiplicity",
    "oriented_consistent",
    "path_dictionary",
    "payoff_upper_bound",
    "penalized_weights",
    "phi_mass_eulerian",
    "phi_mass_traffic",
    "preceq",
    "remove_cycles",
    "render_svg",
    "serialize_competitor",
    "serialize_instance",
    "solve",
    "solve_eulerian",
    "solve_lagrangian",
    "validate_instance",
    "verify_phenomenon",
    "wall_profile",
]
