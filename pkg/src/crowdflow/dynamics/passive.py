"""Passive Brownian reference dynamics used to validate the stochastic integrator.

Integrates ``m dv = (-gamma v - m k^2 x) dt + xi`` for an ensemble of
independent 2-D particles, where ``xi`` is a Gaussian impulse of variance
``2 B dt`` per component and ``k`` is the harmonic stiffness (0 = free).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np


def stokes_gamma(eta: float, radius: float) -> float:
    """Stokes friction ``6 pi eta a`` of a sphere of radius ``a`` in viscosity ``eta``."""
    if not (eta > 0 and radius > 0):
        raise ValueError(f"viscosity and radius must be positive, got {eta}, {radius}")
    return 6.0 * math.pi * eta * radius


@dataclass
class PassiveLangevinConfig:
    gamma: float = 1.0
    noise_strength_B: float = 0.0
    mass: float = 1.0
    stiffness: float = 0.0
    steps: int = 5000
    dt: float = 1e-3
    rng_seed: int = 0
    n_particles: int = 1
    v0: tuple[float, float] = (1.0, 0.0)
    x0: tuple[float, float] = (0.0, 0.0)
    # "implicit": drift-implicit Euler-Maruyama; "explicit": plain Euler-Maruyama
    scheme: str = "implicit"

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.noise_strength_B < 0:
            raise ValueError("noise strength B must be non-negative")
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if self.stiffness < 0:
            raise ValueError("stiffness must be non-negative")
        if self.steps < 1 or not self.dt > 0:
            raise ValueError("need steps >= 1 and dt > 0")
        if self.n_particles < 1:
            raise ValueError("need at least one particle")
        if self.scheme not in ("implicit", "explicit"):
            raise ValueError(f"unknown scheme {self.scheme!r}")

    @property
    def equilibrium_msv(self) -> float:
        """Per-component equilibrium ``<v^2> = B / (gamma m)``."""
        return self.noise_strength_B / (self.gamma * self.mass)


@dataclass
class PassiveResult:
    t: np.ndarray
    v_mean: np.ndarray        # (steps+1, 2) ensemble mean velocity
    msv: np.ndarray           # per-component ensemble <v^2>
    msv_analytic: np.ndarray  # free-particle <v^2(t)>, per component
    decay_analytic: np.ndarray  # (steps+1, 2) v(0) exp(-gamma t / m)
    x_mean: np.ndarray
    energy: np.ndarray        # ensemble mean kinetic + harmonic energy

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "msv_empirical", "msv_analytic"])
            for row in zip(self.t, self.msv, self.msv_analytic):
                w.writerow([repr(float(x)) for x in row])


def langevin_noise(rng: np.random.Generator, shape, B: float, dt: float) -> np.ndarray:
    """Gaussian impulses with mean 0 and variance ``2 B dt``."""
    return rng.normal(0.0, math.sqrt(2.0 * B * dt), size=shape)


def analytic_msv(cfg: PassiveLangevinConfig, t: np.ndarray) -> np.ndarray:
    """Per-component free-particle mean-squared velocity at times ``t``."""
    decay = np.exp(-2.0 * cfg.gamma * t / cfg.mass)
    v0sq = 0.5 * (cfg.v0[0] ** 2 + cfg.v0[1] ** 2)
    return v0sq * decay + cfg.equilibrium_msv * (1.0 - decay)


def simulate_passive(cfg: PassiveLangevinConfig) -> PassiveResult:
    rng = np.random.default_rng(cfg.rng_seed)
    n = cfg.n_particles
    m, g, k2, dt = cfg.mass, cfg.gamma, cfg.stiffness ** 2, cfg.dt
    v = np.tile(np.asarray(cfg.v0, dtype=np.float64), (n, 1))
    x = np.tile(np.asarray(cfg.x0, dtype=np.float64), (n, 1))

    steps = cfg.steps
    v_mean = np.empty((steps + 1, 2))
    x_mean = np.empty((steps + 1, 2))
    msv = np.empty(steps + 1)
    energy = np.empty(steps + 1)

    def record(i):
        v_mean[i] = v.mean(axis=0)
        x_mean[i] = x.mean(axis=0)
        msv[i] = np.mean(v * v)
        energy[i] = np.mean(0.5 * m * (v * v).sum(axis=1) + 0.5 * m * k2 * (x * x).sum(axis=1))

    record(0)
    denom = 1.0 + g * dt / m + k2 * dt * dt
    for i in range(1, steps + 1):
        if cfg.noise_strength_B > 0:
            kick = langevin_noise(rng, (n, 2), cfg.noise_strength_B, dt) / m
        else:
            kick = 0.0
        if cfg.scheme == "implicit":
            v = (v - dt * k2 * x + kick) / denom
            x = x + dt * v
        else:
            v, x = v + dt * (-g / m * v - k2 * x) + kick, x + dt * v
        record(i)

    t = dt * np.arange(steps + 1)
    decay = np.exp(-g * t / m)[:, None] * np.asarray(cfg.v0)[None, :]
    return PassiveResult(t=t, v_mean=v_mean, msv=msv, msv_analytic=analytic_msv(cfg, t),
                         decay_analytic=decay, x_mean=x_mean, energy=energy)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_free_decay(tol: float = 0.01) -> CheckResult:
    cfg = PassiveLangevinConfig(gamma=1.0, noise_strength_B=0.0, steps=5000, dt=1e-3,
                                v0=(1.0, 0.0))
    res = simulate_passive(cfg)
    rel = np.max(np.abs(res.v_mean[:, 0] - res.decay_analytic[:, 0]) / res.decay_analytic[:, 0])
    return CheckResult("free decay v(0)exp(-gamma t/m)", bool(rel <= tol),
                       f"max relative error {rel:.2e} (tol {tol})")


def check_equilibrium(tol: float = 0.05, n_particles: int = 1000, steps: int = 10_000,
                      seed: int = 0) -> CheckResult:
    cfg = PassiveLangevinConfig(gamma=1.0, noise_strength_B=0.5, mass=1.0, steps=steps,
                                dt=1e-2, n_particles=n_particles, rng_seed=seed)
    res = simulate_passive(cfg)
    # discard ten relaxation times
    burn = int(10 * cfg.mass / cfg.gamma / cfg.dt)
    measured = float(res.msv[burn:].mean())
    rel = abs(measured - cfg.equilibrium_msv) / cfg.equilibrium_msv
    return CheckResult("equilibrium <v^2> = B/(gamma m)", bool(rel <= tol),
                       f"measured {measured:.5f} vs {cfg.equilibrium_msv:.5f}, rel {rel:.2e}")


def check_fluctuation_dissipation(kT: float = 0.3, gammas=(0.5, 1.0, 2.0),
                                  tol: float = 0.05, seed: int = 1) -> CheckResult:
    worst = 0.0
    for g in gammas:
        cfg = PassiveLangevinConfig(gamma=g, noise_strength_B=g * kT, steps=4000, dt=1e-2,
                                    n_particles=500, rng_seed=seed, v0=(0.0, 0.0))
        res = simulate_passive(cfg)
        burn = int(10 / g / cfg.dt)
        rel = abs(float(res.msv[burn:].mean()) - kT / cfg.mass) / (kT / cfg.mass)
        worst = max(worst, rel)
    return CheckResult("B = gamma kT gives <v^2> = kT/m for every gamma", bool(worst <= tol),
                       f"worst relative error {worst:.2e} over gamma={list(gammas)}")


def check_noise_moments(n: int = 1_000_000, max_lag: int = 5, seed: int = 2) -> CheckResult:
    B, dt = 0.7, 1e-2
    xi = langevin_noise(np.random.default_rng(seed), n, B, dt)
    sigma = math.sqrt(2 * B * dt)
    mean_ok = abs(xi.mean()) <= 3 * sigma / math.sqrt(n)
    var_rel = abs(xi.var() - sigma ** 2) / sigma ** 2
    z = (xi - xi.mean()) / xi.std()
    lags = [float(np.mean(z[:-k] * z[k:])) for k in range(1, max_lag + 1)]
    lag_ok = all(abs(r) <= 4 / math.sqrt(n) for r in lags)
    return CheckResult("noise mean 0, variance 2B dt, delta-correlated",
                       bool(mean_ok and var_rel <= 0.01 and lag_ok),
                       f"mean {xi.mean():.2e}, var rel {var_rel:.2e}, "
                       f"max |lag corr| {max(abs(r) for r in lags):.2e}")


def check_harmonic_energy(seed: int = 0) -> CheckResult:
    cfg = PassiveLangevinConfig(gamma=0.3, noise_strength_B=0.0, stiffness=2.0, steps=5000,
                                dt=1e-2, v0=(1.0, -0.5), x0=(0.5, 1.0), rng_seed=seed)
    res = simulate_passive(cfg)
    increments = np.diff(res.energy)
    return CheckResult("confined B=0 energy decays monotonically", bool(np.all(increments <= 0)),
                       f"largest energy increment {increments.max():.2e}")


def physics_suite() -> list[CheckResult]:
    return [check_free_decay(), check_noise_moments(), check_equilibrium(),
            check_fluctuation_dissipation(), check_harmonic_energy()]
