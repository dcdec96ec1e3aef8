"""Grayscale morphology with a discrete disk structuring element.

Border rule: neighborhoods are restricted to valid pixels; no padding
value is invented outside the frame.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels


@dataclass(frozen=True)
class StructuringElement:
    """Symmetric pixel-offset set; offsets are (dy, dx) rows."""

    radius: int
    offsets: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.offsets, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "offsets", arr)

    @property
    def size(self) -> int:
        return self.offsets.shape[0]


@lru_cache(maxsize=None)
def disk(radius: int) -> StructuringElement:
    """Disk of pixel offsets (dy, dx) with dy*dy + dx*dx <= radius*radius."""
    if int(radius) != radius or radius < 0:
        raise ValueError(f"radius: must be an integer >= 0, got {radius!r}")
    radius = int(radius)
    rows = [
        (dy, dx)
        for dy in range(-radius, radius + 1)
        for dx in range(-radius, radius + 1)
        if dy * dy + dx * dx <= radius * radius
    ]
    return StructuringElement(radius=radius, offsets=np.array(rows, dtype=np.int64).reshape(len(rows), 2))


def _check_frame(frame) -> np.ndarray:
    arr = np.ascontiguousarray(frame, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D frame, got shape {arr.shape}")
    return arr


def dilate(frame: np.ndarray, se: StructuringElement, *, backend: str | None = None) -> np.ndarray:
    """out[p] = max of frame over the SE neighborhood of p inside the frame."""
    return kernels.grey_dilate(_check_frame(frame), se.offsets, backend=backend)


def erode(frame: np.ndarray, se: StructuringElement, *, backend: str | None = None) -> np.ndarray:
    """out[p] = min of frame over the SE neighborhood of p inside the frame."""
    return kernels.grey_erode(_check_frame(frame), se.offsets, backend=backend)


def close(frame: np.ndarray, radius: int = 2, *, backend: str | None = None) -> np.ndarray:
    """Morphological closing: dilation then erosion with the same disk.

    radius 0 is the identity. Closing is extensive, increasing, and
    idempotent under the valid-pixel border rule.
    """
    if radius == 0:
        return _check_frame(frame).copy()
    se = disk(radius)
    return erode(dilate(frame, se, backend=backend), se, backend=backend)
