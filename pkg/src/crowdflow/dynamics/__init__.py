"""Active Langevin propagation of motion particles plus passive reference dynamics."""
from .forces import (
    ForceBreakdown,
    average_velocity,
    compute_forces,
    coordination_mu,
    gaussian_weight,
    noise_stream,
    relative_velocity,
    viscosity,
)
from .neighbors import NeighborSet, SpatialHash, build_neighbor_index
from .passive import PassiveLangevinConfig, PassiveResult, simulate_passive, stokes_gamma
from .propagate import ballistic_step, integrate_velocity, step

__all__ = [
    "ForceBreakdown",
    "NeighborSet",
    "PassiveLangevinConfig",
    "PassiveResult",
    "SpatialHash",
    "average_velocity",
    "ballistic_step",
    "build_neighbor_index",
    "compute_forces",
    "coordination_mu",
    "gaussian_weight",
    "integrate_velocity",
    "noise_stream",
    "relative_velocity",
    "simulate_passive",
    "step",
    "stokes_gamma",
    "viscosity",
]
