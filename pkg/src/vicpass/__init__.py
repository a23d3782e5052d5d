"""Passivity-preserving variable-stiffness impedance control, simulated.

Library plus CLI: a 6-DOF rigid-body plant under multi-attractor impedance
control, two passivation methods for time-varying stiffness, Gaussian-product
arbitration, an energy-tank baseline, and a scenario harness whose energy
ledger certifies per-step passivity.
"""

from .arbitration import (
    GaussianWrench,
    StiffnessDecomposition,
    gaussian_product,
    scaling_to_stiffness,
    symmetrize_split,
)
from .errors import (
    ChartSingularityError,
    IllConditionedCovarianceError,
    PlantDivergedError,
)
from .geom import Pose
from .harness import (
    TraceTable,
    ViolationMetrics,
    read_trace,
    run_scenario,
    violation_metrics,
    write_trace,
)
from .impedance import (
    CartesianChart,
    CylindricalChart,
    double_diagonalization_damping,
    floor_damping,
    impedance_wrench,
)
from .passivation import (
    InitialEnergyBudget,
    curl_passivation,
    damping_power,
    deflection_limit_continuous,
    deflection_limit_step,
    deflection_passivated_wrench,
    draw_initial_energy,
    stiffness_limit_step,
    stiffness_passivated_wrench,
)
from .plant import PlantParams, PlantState, WallParams, plant_step
from .scenario import (
    AttractorSpec,
    Scenario,
    build_scenario,
    catalogue_names,
    load_scenario,
    random_scenario,
)
from .tank import EnergyTank, tank_step

__version__ = "0.1.0"

__all__ = [
    "AttractorSpec",
    "CartesianChart",
    "ChartSingularityError",
    "CylindricalChart",
    "EnergyTank",
    "GaussianWrench",
    "IllConditionedCovarianceError",
    "InitialEnergyBudget",
    "PlantDivergedError",
    "PlantParams",
    "PlantState",
    "Pose",
    "Scenario",
    "StiffnessDecomposition",
    "TraceTable",
    "ViolationMetrics",
    "WallParams",
    "build_scenario",
    "catalogue_names",
    "curl_passivation",
    "damping_power",
    "deflection_limit_continuous",
    "deflection_limit_step",
    "deflection_passivated_wrench",
    "double_diagonalization_damping",
    "draw_initial_energy",
    "floor_damping",
    "gaussian_product",
    "impedance_wrench",
    "load_scenario",
    "plant_step",
    "random_scenario",
    "read_trace",
    "run_scenario",
    "scaling_to_stiffness",
    "stiffness_limit_step",
    "stiffness_passivated_wrench",
    "symmetrize_split",
    "tank_step",
    "violation_metrics",
    "write_trace",
]
