"""Shared data model: vectors, frames, particles and pipeline configuration.

Coordinates follow image conventions: ``x`` is the column index, ``y`` the
row index, both in pixels. Velocities are in pixels per frame.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields

import numpy as np

TWO_PI = 2.0 * math.pi

# magnitude below which a particle carries no direction information
STATIC_SPEED = 1e-6


@dataclass(frozen=True, slots=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"Vec2 components must be finite, got ({self.x}, {self.y})")

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> Vec2:
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __truediv__(self, k: float) -> Vec2:
        return Vec2(self.x / k, self.y / k)

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)

    def __iter__(self):
        yield self.x
        yield self.y

    def norm(self) -> float:
        return magnitude(self)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


ZERO = Vec2(0.0, 0.0)


def magnitude(v: Vec2) -> float:
    """Euclidean norm of a velocity vector."""
    return math.hypot(v.x, v.y)


def orientation(v: Vec2) -> float:
    """Direction of ``v`` in ``[0, 2*pi)``, counter-clockwise from +x.

    Uses the full-quadrant arctangent; the zero vector maps to 0.
    """
    if v.x == 0.0 and v.y == 0.0:
        return 0.0
    theta = math.atan2(v.y, v.x)
    if theta < 0.0:
        theta += TWO_PI
    # atan2 of a tiny negative y can round up to exactly 2*pi
    if theta >= TWO_PI:
        theta = 0.0
    return theta


def quantize_orientation(theta: float, b: int, centered: bool = False) -> int:
    """Map an angle in ``[0, 2*pi)`` to one of ``b`` direction bins.

    With ``centered=False`` bin ``k`` is ``[k*2pi/b, (k+1)*2pi/b)``. With
    ``centered=True`` every boundary is shifted back by half a bin, so bin
    ``k`` is centred on ``k*2pi/b`` and axis-aligned motion never sits on a
    boundary.
    """
    if b < 2:
        raise ValueError(f"need at least 2 bins, got {b}")
    width = TWO_PI / b
    if centered:
        theta = theta + 0.5 * width
        if theta >= TWO_PI:
            theta -= TWO_PI
    k = int(math.floor(theta / width))
    return min(max(k, 0), b - 1)


@dataclass(frozen=True, slots=True)
class GrayFrame:
    """Single-channel intensity image stored as a read-only ``(height, width)`` array."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"GrayFrame needs a non-empty 2-D array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 255.0:
            raise ValueError("GrayFrame intensities must lie in [0, 255]")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def contains(self, p: Vec2) -> bool:
        return 0.0 <= p.x <= self.width - 1 and 0.0 <= p.y <= self.height - 1


@dataclass(frozen=True, slots=True)
class Particle:
    id: int
    pos: Vec2
    vel: Vec2
    magnitude: float
    orientation: float
    bin: int
    alive: bool = True

    @classmethod
    def from_motion(cls, id: int, pos: Vec2, vel: Vec2, bins: int,
                    centered: bool = False, alive: bool = True) -> Particle:
        """Build a particle, deriving magnitude, orientation and bin from ``vel``."""
        theta = orientation(vel)
        return cls(id=id, pos=pos, vel=vel, magnitude=magnitude(vel),
                   orientation=theta, bin=quantize_orientation(theta, bins, centered),
                   alive=alive)

    def moved(self, pos: Vec2, vel: Vec2, bins: int, centered: bool = False,
              alive: bool | None = None) -> Particle:
        return Particle.from_motion(self.id, pos, vel, bins, centered,
                                    self.alive if alive is None else alive)

    def killed(self) -> Particle:
        return dataclasses.replace(self, alive=False)

    def check(self, bins: int, centered: bool = False) -> None:
        """Raise ``AssertionError`` if the derived fields are inconsistent."""
        assert abs(self.magnitude - magnitude(self.vel)) <= 1e-9, "magnitude != |vel|"
        assert 0.0 <= self.orientation < TWO_PI, "orientation out of range"
        assert 0 <= self.bin < bins, "bin out of range"
        if self.alive:
            assert self.bin == quantize_orientation(self.orientation, bins, centered), \
                "bin does not match orientation"


def check_particles(particles, bins: int, centered: bool = False) -> None:
    for p in particles:
        p.check(bins, centered)


@dataclass
class PipelineConfig:
    """Parameters of keypoint extraction, propagation and rendering.

    Defaults give a valid configuration, so an empty config file is fine.
    """

    window_size: int = 10
    bins: int = 8
    beta: float = 0.5
    kernel_radius: float = 20.0
    max_neighbors: int = 8
    noise_sigma: float = 0.01
    rng_seed: int = 0
    fast_threshold: int = 20
    lk_window: int = 15
    lk_pyramid_levels: int = 3
    lk_iterations: int = 20
    lk_epsilon: float = 0.01
    render_radius: float = 5.0
    diff_threshold: int = 10
    centered_bins: bool = True
    explicit_friction: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        problems = []
        if self.window_size < 3:
            problems.append("window_size must be >= 3")
        if self.bins < 2:
            problems.append("bins must be >= 2")
        if not math.isfinite(self.beta):
            problems.append("beta must be finite")
        if not self.kernel_radius > 0:
            problems.append("kernel_radius must be > 0")
        if self.max_neighbors < 1:
            problems.append("max_neighbors must be >= 1")
        if not self.noise_sigma >= 0:
            problems.append("noise_sigma must be >= 0")
        if self.rng_seed < 0:
            problems.append("rng_seed must be >= 0")
        if not 1 <= self.fast_threshold <= 127:
            problems.append("fast_threshold must be in [1, 127]")
        if self.lk_window < 3 or self.lk_window % 2 == 0:
            problems.append("lk_window must be an odd integer >= 3")
        if self.lk_pyramid_levels < 1:
            problems.append("lk_pyramid_levels must be >= 1")
        if self.lk_iterations < 1:
            problems.append("lk_iterations must be >= 1")
        if not self.lk_epsilon > 0:
            problems.append("lk_epsilon must be > 0")
        if not self.render_radius > 0:
            problems.append("render_radius must be > 0")
        if not 0 <= self.diff_threshold <= 255:
            problems.append("diff_threshold must be in [0, 255]")
        if problems:
            raise ValueError("invalid PipelineConfig: " + "; ".join(problems))

    def replace(self, **changes) -> PipelineConfig:
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def field_types(cls) -> dict:
        return {f.name: f.type for f in fields(cls)}
