"""Crowd flow segmentation with an active Langevin particle model."""
from .core import GrayFrame, Particle, PipelineConfig, Vec2

__version__ = "0.1.0"

__all__ = ["GrayFrame", "Particle", "PipelineConfig", "Vec2", "__version__"]
