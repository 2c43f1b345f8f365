"""Random lower bound: uniform per-pixel depth over the dataset range.

Each image gets its own counter-based stream keyed by SHA-256(seed, image_id),
so the numbers do not depend on evaluation order or parallelism.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .model import DepthMap


@dataclass(frozen=True)
class RandomBaselineConfig:
    seed: int = 42
    low: float = 0.0  # exclusive
    high: float = 10.0  # inclusive

    def __post_init__(self):
        if not (0 <= self.low < self.high and np.isfinite(self.high)):
            raise ValidationError(f"need 0 <= low < high, got ({self.low}, {self.high})")


def _image_generator(cfg: RandomBaselineConfig, image_id: str) -> np.random.Generator:
    digest = hashlib.sha256(
        np.uint64(cfg.seed & 0xFFFFFFFFFFFFFFFF).tobytes() + image_id.encode("utf-8")
    ).digest()
    key = np.frombuffer(digest[:16], dtype=np.uint64)  # Philox wants a 128-bit key
    return np.random.Generator(np.random.Philox(key=key))


def random_depth_map(
    cfg: RandomBaselineConfig, image_id: str, height: int, width: int
) -> DepthMap:
    """Uniform draws on (low, high] for every pixel; bit-reproducible per image."""
    if height < 1 or width < 1:
        raise ValidationError(f"map shape must be >= 1x1, got {height}x{width}")
    rng = _image_generator(cfg, image_id)
    # random() is [0, 1); flip it so the open end lands on `low`
    u = rng.random((height, width), dtype=np.float64)
    return DepthMap(cfg.high - u * (cfg.high - cfg.low))
