"""Coupled map/conformal-structure gradient flow on the flat torus.

A map from the unit-area flat torus into an embedded compact target evolves
by its tension field while the flat structure evolves by the projected mean
of the Hopf coefficient, lowering the Dirichlet energy in both variables.
The package also ships closed-form collar geometry and randomized harnesses
for the quadratic-differential estimates that control the flow's asymptotic
behaviour.
"""

from .config import RunConfig, parse_config
from .domain import (MapField, QuadDiffField, dbar, energy, gradient_integrals,
                     hopf_differential, isothermal_derivatives, laplace_beltrami,
                     project_holomorphic, qd_norms, tension)
from .errors import (ConfigError, ContractViolation, EnergyGuardError, FlowAbort,
                     LatticeFloorError, ProjectionError, TorusFlowError)
from .flow import (FlowState, RunResult, cfl_dt, concentration_monitor,
                   energy_decay_rate, lattice_velocity_ab,
                   lattice_velocity_alphabeta, make_state, resume, run, step)
from .generators import constant_map, covering_map, lonlat_map, make_initial_map, perturbed
from .hyperbolic import (collar_density, collar_halfwidth, collar_width,
                         collar_width_by_quadrature, incompressible_energy_bound)
from .lattice import LatticeParams, metric_variation
from .targets import TargetManifold

__version__ = "0.1.0"

__all__ = [
    "RunConfig", "parse_config",
    "MapField", "QuadDiffField", "dbar", "energy", "gradient_integrals",
    "hopf_differential", "isothermal_derivatives", "laplace_beltrami",
    "project_holomorphic", "qd_norms", "tension",
    "ConfigError", "ContractViolation", "EnergyGuardError", "FlowAbort",
    "LatticeFloorError", "ProjectionError", "TorusFlowError",
    "FlowState", "RunResult", "cfl_dt", "concentration_monitor",
    "energy_decay_rate", "lattice_velocity_ab", "lattice_velocity_alphabeta",
    "make_state", "resume", "run", "step",
    "constant_map", "covering_map", "lonlat_map", "make_initial_map", "perturbed",
    "collar_density", "collar_halfwidth", "collar_width",
    "collar_width_by_quadrature", "incompressible_energy_bound",
    "LatticeParams", "metric_variation",
    "TargetManifold",
]
