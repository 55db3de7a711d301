"""Scattering lengths of nonnegative radial pair potentials and rigorous
upper and lower bounds on the dilute Bose gas ground-state energy, with
brute-force and Monte-Carlo oracles for every closed-form ingredient."""

from .cells import (
    CellDistribution,
    assemble_cell_bound,
    brute_force_distribution,
    cell_objective,
    closed_form_minimum,
)
from .lower_bound import (
    DEFAULT_ANSATZ_EXPONENTS,
    ExponentReport,
    K_factor,
    LowerBoundParams,
    SoftPotential,
    TempleGapError,
    asymptotic_error,
    exponent_conditions,
    finite_box_lower_bound,
    first_order_brackets,
    fit_error_power_law,
    nearest_neighbor_interaction,
    optimize_parameters,
    soft_potential,
    superadditive_split,
    temple_bound,
    thermo_lower_bound,
    variance_bound,
)
from .oracles import (
    EstimateWithError,
    McConfig,
    TrialProfile,
    dyson_lemma_check,
    energy_identity_sweep,
    mc_expectation_WR,
    temple_toy_check,
    trial_energy_mc,
)
from .potentials import (
    HardCore,
    PotentialError,
    PowerTail,
    RadialPotential,
    Shells,
    SquareWell,
    Tabulated,
    born_integral,
    evaluate,
    parse_potential_config,
    truncate,
)
from .scattering import (
    EnergyIdentity,
    ScatteringSolution,
    energy_identity,
    radial_form_minimize,
    scattering_length,
    solve_zero_energy,
)
from .upper_bounds import (
    DYSON_LOWER_RATIO,
    LHY_LOG_COEFF,
    LHY_SQRT_COEFF,
    BoundResult,
    FiniteBox,
    GasParameters,
    dirichlet_correction,
    dyson_hard_sphere,
    lhy_expansion,
    upper_bound_finite_range,
    upper_bound_periodic,
    upper_bound_thermo,
)

__version__ = "0.1.0"
