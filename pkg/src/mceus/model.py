"""Core data model: frames, cine loops, ROIs, pipeline configuration."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

VALID_METHODS = ("none", "minip", "perip", "stat")


class LoadError(ValueError):
    """A file could not be ingested (missing, malformed, or inconsistent)."""


class DegenerateReferenceError(ArithmeticError):
    """The quality reference frame carries no usable signal."""


def as_frame(values, *, copy: bool = False) -> np.ndarray:
    """Validate and return a 2-D float64 frame with intensities in [0, 1]."""
    arr = np.array(values, dtype=np.float64, copy=copy) if copy else np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"frame must be 2-D with positive dimensions, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("frame contains non-finite values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("frame intensities must lie in [0, 1]")
    return arr


@dataclass(frozen=True)
class CineLoop:
    """An ordered stack of normalized frames plus acquisition metadata.

    frames has shape (n_frames, height, width), dtype float64, values in
    [0, 1], and is made read-only at construction. pre_contrast is the
    inclusive index range of frames acquired before contrast arrival.
    """

    frames: np.ndarray
    frame_rate_hz: float
    pre_contrast: tuple[int, int]
    bolus_arrival_index: int

    def __post_init__(self):
        arr = np.ascontiguousarray(self.frames, dtype=np.float64)
        if arr.ndim != 3:
            raise ValueError(f"frames must be a 3-D stack, got shape {arr.shape}")
        n, h, w = arr.shape
        if n < 1 or h < 1 or w < 1:
            raise ValueError(f"frames: every dimension must be positive, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("frames: non-finite intensity")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("frames: intensities must lie in [0, 1]")
        if not (isinstance(self.frame_rate_hz, (int, float)) and math.isfinite(self.frame_rate_hz) and self.frame_rate_hz > 0):
            raise ValueError(f"frame_rate_hz: must be finite and positive, got {self.frame_rate_hz!r}")
        start, end = int(self.pre_contrast[0]), int(self.pre_contrast[1])
        bolus = int(self.bolus_arrival_index)
        if not (0 <= start <= end):
            raise ValueError(f"pre_contrast: need 0 <= start <= end, got ({start}, {end})")
        if not (end < bolus):
            raise ValueError(f"pre_contrast: end ({end}) must precede bolus_arrival_index ({bolus})")
        if not (bolus <= n - 1):
            raise ValueError(f"bolus_arrival_index: {bolus} out of range for {n} frames")
        arr.setflags(write=False)
        object.__setattr__(self, "frames", arr)
        object.__setattr__(self, "frame_rate_hz", float(self.frame_rate_hz))
        object.__setattr__(self, "pre_contrast", (start, end))
        object.__setattr__(self, "bolus_arrival_index", bolus)

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def height(self) -> int:
        return self.frames.shape[1]

    @property
    def width(self) -> int:
        return self.frames.shape[2]

    @property
    def pre_contrast_frames(self) -> np.ndarray:
        """Read-only view of the pre-contrast segment."""
        start, end = self.pre_contrast
        return self.frames[start:end + 1]

    def time_of(self, index: int) -> float:
        """Acquisition time of a frame in seconds from the loop start."""
        return index / self.frame_rate_hz


def polygon_mask(polygon: np.ndarray, width: int, height: int) -> np.ndarray:
    """Rasterize a polygon to a boolean pixel mask.

    A pixel (x, y) belongs to the mask iff its center (x + 0.5, y + 0.5)
    is inside the polygon under the even-odd rule. Coordinates are in
    pixel units with the origin at the top-left corner of the top-left
    pixel. The result is independent of vertex traversal direction.
    """
    poly = np.asarray(polygon, dtype=np.float64)
    if poly.ndim != 2 or poly.shape[1] != 2 or poly.shape[0] < 3:
        raise ValueError(f"polygon must be (v, 2) with v >= 3, got shape {poly.shape}")
    if not np.all(np.isfinite(poly)):
        raise ValueError("polygon contains non-finite vertices")
    px = np.arange(width, dtype=np.float64) + 0.5
    py = np.arange(height, dtype=np.float64) + 0.5
    cx = np.broadcast_to(px[None, :], (height, width))
    cy = np.broadcast_to(py[:, None], (height, width))
    inside = np.zeros((height, width), dtype=bool)
    x1, y1 = poly[:, 0], poly[:, 1]
    x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
    for i in range(poly.shape[0]):
        ax, ay, bx, by = x1[i], y1[i], x2[i], y2[i]
        if ay == by:
            continue  # horizontal edge never changes scanline parity
        if (ay, ax) > (by, bx):
            ax, ay, bx, by = bx, by, ax, ay  # canonical order: identical arithmetic either traversal direction
        spans = (ay > cy) != (by > cy)
        if not spans.any():
            continue
        xint = ax + (cy - ay) * (bx - ax) / (by - ay)
        inside ^= spans & (cx < xint)
    return inside


@dataclass(frozen=True)
class Roi:
    """A labeled polygonal region with its rasterized mask."""

    label: str
    polygon: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        poly = np.asarray(self.polygon, dtype=np.float64)
        mask = np.asarray(self.mask, dtype=bool)
        poly.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "polygon", poly)
        object.__setattr__(self, "mask", mask)


@dataclass(frozen=True)
class RoiSet:
    rois: tuple[Roi, ...]

    def __post_init__(self):
        object.__setattr__(self, "rois", tuple(self.rois))

    def get(self, label: str) -> Roi:
        for roi in self.rois:
            if roi.label == label:
                return roi
        raise KeyError(label)

    def labels(self) -> list[str]:
        return [r.label for r in self.rois]


def build_roi_set(entries: Iterable[tuple[str, Sequence]], width: int, height: int) -> RoiSet:
    """Rasterize (label, polygon) pairs against the given frame size.

    Vertices may touch the frame edges but must not leave the frame.
    """
    rois = []
    for label, polygon in entries:
        poly = np.asarray(polygon, dtype=np.float64)
        if poly.ndim != 2 or poly.shape[1] != 2:
            raise LoadError(f"roi {label!r}: polygon must be a list of [x, y] pairs")
        if poly.shape[0] < 3:
            raise LoadError(f"roi {label!r}: polygon needs at least 3 vertices, got {poly.shape[0]}")
        if not np.all(np.isfinite(poly)):
            raise LoadError(f"roi {label!r}: polygon has non-finite vertices")
        if poly[:, 0].min() < 0 or poly[:, 0].max() > width or poly[:, 1].min() < 0 or poly[:, 1].max() > height:
            raise LoadError(f"roi {label!r}: polygon leaves the {width}x{height} frame bounds")
        rois.append(Roi(label=str(label), polygon=poly, mask=polygon_mask(poly, width, height)))
    return RoiSet(rois=tuple(rois))


@dataclass(frozen=True)
class PipelineConfig:
    """Enhancement settings shared by the library, CLI, and service."""

    method: str = "stat"
    alpha: float = 2.7
    window_w: int = 20
    percentile_p: float = 20.0
    closure_radius: int = 2
    leakage_removal: bool = True
    average_frames: int = 1

    def __post_init__(self):
        if self.method not in VALID_METHODS:
            raise ValueError(f"method: expected one of {VALID_METHODS}, got {self.method!r}")
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError(f"alpha: must be finite and >= 0, got {self.alpha!r}")
        if int(self.window_w) != self.window_w or self.window_w < 2:
            raise ValueError(f"window_w: must be an integer >= 2, got {self.window_w!r}")
        if not (0 < self.percentile_p <= 100):
            raise ValueError(f"percentile_p: must lie in (0, 100], got {self.percentile_p!r}")
        if int(self.closure_radius) != self.closure_radius or self.closure_radius < 0:
            raise ValueError(f"closure_radius: must be an integer >= 0, got {self.closure_radius!r}")
        if int(self.average_frames) != self.average_frames or self.average_frames < 1:
            raise ValueError(f"average_frames: must be an integer >= 1, got {self.average_frames!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "window_w", int(self.window_w))
        object.__setattr__(self, "percentile_p", float(self.percentile_p))
        object.__setattr__(self, "closure_radius", int(self.closure_radius))
        object.__setattr__(self, "average_frames", int(self.average_frames))

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "alpha": self.alpha,
            "window_w": self.window_w,
            "percentile_p": self.percentile_p,
            "closure_radius": self.closure_radius,
            "leakage_removal": self.leakage_removal,
            "average_frames": self.average_frames,
        }

    def with_overrides(self, **kwargs) -> "PipelineConfig":
        return replace(self, **kwargs)
