"""Three-level ecoepidemic food chain: equilibrium, stability and trajectory analysis."""

from .equilibria import (
    Equilibrium,
    ThresholdPair,
    disease_free_equilibria,
    find_equilibria,
    logistic_boundary_equilibria,
    logistic_coexistence,
    malthus_equilibria,
    remark1_infeasibility,
    remark2_gap,
    thresholds,
)
from .model import (
    FIGURE_PARAMS,
    ModelVariant,
    ParameterSet,
    jacobian,
    jacobian_fd,
    total_population,
    validate_params,
    vector_field,
)
from .simulate import (
    IntegratorConfig,
    Trajectory,
    boundedness_monitor,
    detect_longterm,
    integrate,
    lv_first_integral,
)
from .stability import (
    BranchTable,
    CharPoly,
    Stability,
    StabilityClass,
    bifurcation_sweep,
    char_poly,
    classify,
    eigenvalues,
    malthus_coexistence_certificate,
    routh_hurwitz,
)

__version__ = "0.1.0"
