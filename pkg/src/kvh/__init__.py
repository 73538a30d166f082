"""JWKB eigenfunctions, characteristics and phase-space propagators for one-dimensional wells."""

from .characteristics import (FlowMap, Trajectory, TrajectoryPoint, flow_map, integrate,
                              integrate_splitting, maslov_count, van_vleck_factor)
from .deltas import GeneralizedDelta, k_ladder, product_identity_residual, sqrt_delta_orthonormality
from .diagnostics import (DensityReport, compare_to_exact, exact_ho_eigenfunction, inner_product_config,
                          inner_product_phase, orthonormality_matrix, physical_density)
from .eigen import (ActionAngleChart, SemiclassicalEigenfunction, action_of_energy, energy_of_action,
                    eval_config_space, eval_phase_space, forbidden_action_Wtilde, hamilton_principal_W,
                    make_chart, quantize, spectrum)
from .errors import (ActionOutOfRange, AxisMismatch, BoundaryLeak, CausticReached, CausticUnresolved,
                     EnergyAboveWell, EnergyBelowWell, ExponentSumInvalid, InsideAllowedRegion, KvhError,
                     OutOfDomain, OutsideAllowedRegion, RegionMismatch, StepFailure)
from .grids import ConfigGrid, PhaseSpaceGrid, eigen_ridge, gaussian_state
from .propagators import PropagatorKind, project_to_config, propagate, propagate_config
from .systems import (HamiltonianField, SeparableWell, harmonic, lagrangian, make_system, momentum_branches,
                      quartic, turning_points)

__version__ = "0.1.0"

__all__ = [
    "action_of_energy", "ActionAngleChart", "ActionOutOfRange", "AxisMismatch", "BoundaryLeak",
    "CausticReached", "CausticUnresolved", "compare_to_exact", "ConfigGrid", "DensityReport", "eigen_ridge",
    "energy_of_action", "EnergyAboveWell", "EnergyBelowWell", "eval_config_space", "eval_phase_space",
    "exact_ho_eigenfunction", "ExponentSumInvalid", "flow_map", "FlowMap", "forbidden_action_Wtilde",
    "gaussian_state", "GeneralizedDelta", "hamilton_principal_W", "HamiltonianField", "harmonic",
    "inner_product_config", "inner_product_phase", "InsideAllowedRegion", "integrate", "integrate_splitting",
    "k_ladder", "KvhError", "lagrangian", "make_chart", "make_system", "maslov_count", "momentum_branches",
    "orthonormality_matrix", "OutOfDomain", "OutsideAllowedRegion", "PhaseSpaceGrid", "physical_density",
    "product_identity_residual", "project_to_config", "propagate", "propagate_config", "PropagatorKind",
    "quantize", "quartic", "RegionMismatch", "SemiclassicalEigenfunction", "SeparableWell", "spectrum",
    "sqrt_delta_orthonormality", "StepFailure", "Trajectory", "TrajectoryPoint", "turning_points",
    "van_vleck_factor",
]
