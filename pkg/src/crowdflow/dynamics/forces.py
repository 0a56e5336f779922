"""Force terms of the active Langevin crowd model.

Each keypoint feels a viscous force set by how its neighbours are spread,
an interaction pulling it towards the kernel-weighted neighbour velocity,
a self-propelling drift along its own velocity and a small random kick.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..core import ZERO, Particle, PipelineConfig, Vec2, magnitude
from .neighbors import NeighborSet

# |v_avg| below this makes the coordination coefficient degenerate
MIN_AVG_SPEED = 1e-9


@dataclass(frozen=True, slots=True)
class ForceBreakdown:
    external: Vec2
    interaction: Vec2
    drift: Vec2
    random: Vec2
    active: Vec2
    gamma: float = 0.0
    mu: float = 0.0


def viscosity(neighbors: NeighborSet) -> float:
    """``1 - mean(d) / max(d)`` over neighbour distances, clamped to [0, 1].

    Zero for an empty neighbourhood or when every neighbour is equally far.
    """
    d = neighbors.distances
    if not d:
        return 0.0
    dmax = max(d)
    if dmax <= 0.0:
        return 0.0
    gamma = 1.0 - sum(d) / (len(d) * dmax)
    return min(max(gamma, 0.0), 1.0)


def gaussian_weight(dist: float, h: float) -> float:
    """Truncated Gaussian kernel: ``exp(-dist^2/h^2)`` for ``dist <= h``, else 0."""
    if dist / h <= 1.0:
        return math.exp(-(dist * dist) / (h * h))
    return 0.0


def relative_velocity(particle: Particle, neighbors: NeighborSet,
                      lookup: Mapping[int, Particle], h: float) -> Vec2:
    """Kernel-weighted mean neighbour velocity; own velocity if all weights vanish."""
    wsum = 0.0
    vx = vy = 0.0
    for j, d in zip(neighbors.indices, neighbors.distances):
        w = gaussian_weight(d, h)
        v = lookup[j].vel
        wsum += w
        vx += w * v.x
        vy += w * v.y
    if wsum <= 0.0:
        return particle.vel
    return Vec2(vx / wsum, vy / wsum)


def average_velocity(particle: Particle, neighbors: NeighborSet,
                     lookup: Mapping[int, Particle]) -> Vec2:
    """Plain mean of neighbour velocities; own velocity with no neighbours."""
    if not neighbors.indices:
        return particle.vel
    n = len(neighbors.indices)
    vx = sum(lookup[j].vel.x for j in neighbors.indices)
    vy = sum(lookup[j].vel.y for j in neighbors.indices)
    return Vec2(vx / n, vy / n)


def coordination_mu(v_rel: Vec2, v_avg: Vec2) -> float:
    """Ratio ``|v_rel| / |v_avg|``; 0 when the average velocity vanishes."""
    avg = magnitude(v_avg)
    if avg < MIN_AVG_SPEED:
        return 0.0
    return magnitude(v_rel) / avg


def noise_stream(seed: int, particle_id: int, frame_index: int) -> np.random.Generator:
    """Counter-based generator keyed by (seed, particle, frame).

    Philox is a counter-based bit generator, so every key gets an independent
    stream regardless of evaluation order.
    """
    bg = np.random.Philox(key=seed, counter=[particle_id, frame_index, 0, 0])
    return np.random.Generator(bg)


def random_force(cfg: PipelineConfig, particle_id: int, frame_index: int) -> Vec2:
    if cfg.noise_sigma == 0.0:
        return ZERO
    xi = noise_stream(cfg.rng_seed, particle_id, frame_index).normal(0.0, cfg.noise_sigma, 2)
    return Vec2(float(xi[0]), float(xi[1]))


def compute_forces(particle: Particle, neighbors: NeighborSet,
                   lookup: Mapping[int, Particle], cfg: PipelineConfig,
                   frame_index: int) -> ForceBreakdown:
    """Evaluate every force on ``particle`` from the current (old) state.

    Args:
        particle: the particle being advanced.
        neighbors: its neighbourhood in the same snapshot.
        lookup: particle id -> particle for that snapshot.
        cfg: supplies ``beta``, ``kernel_radius``, ``noise_sigma``, ``rng_seed``.
        frame_index: global frame index, keys the noise stream.
    """
    v = particle.vel
    gamma = viscosity(neighbors)
    v_rel = relative_velocity(particle, neighbors, lookup, cfg.kernel_radius)
    v_avg = average_velocity(particle, neighbors, lookup)
    mu = coordination_mu(v_rel, v_avg) if neighbors.indices else 0.0
    external = -gamma * v
    interaction = -mu * (v - v_rel)
    drift = cfg.beta * v
    return ForceBreakdown(
        external=external,
        interaction=interaction,
        drift=drift,
        random=random_force(cfg, particle.id, frame_index),
        active=interaction + drift,
        gamma=gamma,
        mu=mu,
    )
