"""Uniformly sampled complex fields.

Sampling convention: pixel centers, row-major, x fastest. Pixel (ix, iy) sits at
x = -extent_x + (ix + 0.5) * 2 extent_x / width, likewise for y.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import DomainError

PUPIL = "pupil"
IMAGE = "image"


def fresnel_plane(z: float) -> str:
    return f"fresnel(z={z:.17g})"


@dataclass(frozen=True)
class GridSpec:
    width: int
    height: int
    extent_x: float
    extent_y: float

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise DomainError(f"grid size must be positive, got {self.width}x{self.height}")
        if not (self.extent_x > 0 and self.extent_y > 0):
            raise DomainError("grid extent must be positive")

    @classmethod
    def square(cls, size: int, extent: float) -> "GridSpec":
        return cls(size, size, extent, extent)

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        x = -self.extent_x + (np.arange(self.width) + 0.5) * (2.0 * self.extent_x / self.width)
        y = -self.extent_y + (np.arange(self.height) + 0.5) * (2.0 * self.extent_y / self.height)
        return x, y

    def cartesian(self) -> tuple[np.ndarray, np.ndarray]:
        x, y = self.axes()
        return np.meshgrid(x, y, indexing="xy")

    def polar(self) -> tuple[np.ndarray, np.ndarray]:
        xx, yy = self.cartesian()
        return np.hypot(xx, yy), np.arctan2(yy, xx)


@dataclass(eq=False)
class FieldGrid:
    """Sampled scalar field; ``samples`` has shape (height, width)."""

    spec: GridSpec
    samples: np.ndarray
    plane: str = PUPIL

    def __post_init__(self):
        if self.samples.shape != (self.spec.height, self.spec.width):
            raise DomainError(
                f"samples shape {self.samples.shape} does not match "
                f"{self.spec.height}x{self.spec.width}"
            )

    @property
    def width(self) -> int:
        return self.spec.width

    @property
    def height(self) -> int:
        return self.spec.height

    def covers_unit_disc(self) -> bool:
        return self.spec.extent_x >= 1.0 and self.spec.extent_y >= 1.0

    def intensity(self) -> np.ndarray:
        return np.abs(self.samples) ** 2


PolarSampler = Callable[[np.ndarray, np.ndarray], np.ndarray]


def sample_polar(spec: GridSpec, fn: PolarSampler, threads: int = 1, dtype=complex) -> np.ndarray:
    """Evaluate ``fn(r, phi)`` on every pixel, row blocks spread over ``threads`` workers.

    Each pixel is computed independently, so the result does not depend on the
    worker count.
    """
    r, phi = spec.polar()
    out = np.empty(r.shape, dtype=dtype)
    if threads <= 1 or spec.height < 2:
        out[:] = fn(r, phi)
        return out

    blocks = np.array_split(np.arange(spec.height), min(threads, spec.height))

    def _run(rows: np.ndarray):
        out[rows] = fn(r[rows], phi[rows])

    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(_run, blocks))
    return out


def disc_mask(spec: GridSpec) -> np.ndarray:
    r, _ = spec.polar()
    return r <= 1.0

