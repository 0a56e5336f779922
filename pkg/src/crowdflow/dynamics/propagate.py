from __future__ import annotations

from ..core import Particle, PipelineConfig, Vec2
from .forces import ForceBreakdown, compute_forces
from .neighbors import build_neighbor_index


def integrate_velocity(v_old: Vec2, forces: ForceBreakdown, gamma: float,
                       dt: float = 1.0, mass: float = 1.0, explicit: bool = False) -> Vec2:
    """Advance one velocity by ``dt``.

    The default treats friction implicitly, solving
    ``v_new = v_old - gamma*v_new*dt + (F_active + xi)*dt`` for ``v_new``.
    ``explicit=True`` uses ``v_old`` in the friction term instead.
    """
    kick = (forces.active + forces.random) * (dt / mass)
    if explicit:
        return v_old * (1.0 - gamma * dt / mass) + kick
    return (v_old + kick) / (1.0 + gamma * dt / mass)


def step(particles: list[Particle], cfg: PipelineConfig, frame_index: int,
         bounds: tuple[int, int] | None = None) -> list[Particle]:
    """Move every alive particle one frame forward (unit mass, unit time step).

    All forces are evaluated from the incoming snapshot before any particle
    moves. A particle whose new position falls outside ``bounds``
    (``(width, height)``) is marked dead; dead particles are carried unchanged.
    """
    neighbor_sets = build_neighbor_index(particles, cfg.kernel_radius, cfg.max_neighbors)
    lookup = {p.id: p for p in particles}
    out = []
    for p, nbrs in zip(particles, neighbor_sets):
        if not p.alive:
            out.append(p)
            continue
        forces = compute_forces(p, nbrs, lookup, cfg, frame_index)
        v_new = integrate_velocity(p.vel, forces, forces.gamma, explicit=cfg.explicit_friction)
        r_new = p.pos + v_new
        alive = True
        if bounds is not None:
            w, h = bounds
            alive = 0.0 <= r_new.x <= w - 1 and 0.0 <= r_new.y <= h - 1
        out.append(p.moved(r_new, v_new, cfg.bins, cfg.centered_bins, alive=alive))
    return out


def ballistic_step(particles: list[Particle], cfg: PipelineConfig, frame_index: int,
                   bounds: tuple[int, int] | None = None) -> list[Particle]:
    """Force-free reference: constant velocity, straight-line motion."""
    out = []
    for p in particles:
        if not p.alive:
            out.append(p)
            continue
        r_new = p.pos + p.vel
        alive = True
        if bounds is not None:
            w, h = bounds
            alive = 0.0 <= r_new.x <= w - 1 and 0.0 <= r_new.y <= h - 1
        out.append(p.moved(r_new, p.vel, cfg.bins, cfg.centered_bins, alive=alive))
    return out
