"""Riesz s-equilibrium measures on strictly self-similar fractals.

A numerical laboratory: cell-tree discretization of a strictly separated
self-similar attractor, Riesz s-energy forms on cell measures, a simplex
QP solver with a Frostman-gap certificate, and density/potential
diagnostics for the s -> d limit.
"""

__version__ = "0.1.0"

from .errors import (
    InternalConsistencyError,
    InvalidInputError,
    PointOffAttractorError,
    ResourceBudgetError,
    RieszEqError,
    SeparationViolationError,
    SolverUnconvergedError,
)
from .fractal import (
    CellTree,
    Ifs,
    Similitude,
    Word,
    build_cell_tree,
    code_point,
    composed_map,
    copies_cell,
    copies_diameter_bound,
    ifs_from_dict,
    interval_tree,
    load_ifs,
    make_ifs,
    moran_dimension,
    point_at,
    random_word,
    validate_strict_separation,
)
from .measure import (
    BallQuery,
    CellMeasure,
    aggregate_to_level,
    ball_mass,
    ball_mass_profile,
    cell_discrepancy,
    load_measure_csv,
    natural_measure,
    radon_nikodym_wrt_natural,
    save_measure_csv,
)
from .energy import (
    BallMassPotential,
    EnergyCurve,
    EnergyForm,
    PotentialField,
    assemble,
    bilinear,
    energy,
    extrapolate_linear,
    normalized_energy_curve,
    potential,
    potential_by_ballmass,
)
from .equilibrium import (
    GrowthProfile,
    SolveResult,
    SweepResult,
    growth_profile,
    solve,
    sweep,
    two_start_uniqueness_gap,
)
from .density import (
    AhlforsEstimate,
    CodedPoint,
    ConstantEstimate,
    DensityProfile,
    NormalizedPotentialEstimate,
    OrderTwoEstimate,
    ahlfors_constants,
    d_tilde_constant,
    normalized_potential_limit,
    order_two_density,
    sample_coded_points,
    theta_profile,
)
from .harness import ExperimentConfig, Report, build_s_grid, run_experiment
