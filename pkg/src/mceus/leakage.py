"""Tissue-leakage background model built from pre-contrast frames."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import CineLoop, DegenerateReferenceError

DEGENERATE_TOTAL = 1e-9


@dataclass(frozen=True)
class LeakageModel:
    """Per-pixel maximum over the pre-contrast frames, plus quality info.

    spread_ratio compares the model's total intensity with a single
    reference pre-contrast frame; 1.0 means a static background, larger
    values mean motion or intermittency smeared the model.
    """

    model: np.ndarray
    source_range: tuple[int, int]
    reference_index: int
    spread_ratio: float

    def __post_init__(self):
        arr = np.ascontiguousarray(self.model, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "model", arr)


def reference_frame_index(loop: CineLoop) -> int:
    """Pre-contrast frame whose total intensity is the median.

    For an even number of pre-contrast frames the lower median is taken.
    Returns a global frame index.
    """
    start, end = loop.pre_contrast
    totals = loop.pre_contrast_frames.sum(axis=(1, 2))
    order = np.argsort(totals, kind="stable")
    return start + int(order[(totals.size - 1) // 2])


def spread_ratio(loop: CineLoop, model: np.ndarray) -> float:
    """Total model intensity over total reference-frame intensity.

    Raises DegenerateReferenceError when the reference frame total falls
    below 1e-9 (an all-dark reference cannot normalize anything).
    """
    ref = loop.frames[reference_frame_index(loop)]
    denom = float(ref.sum())
    if denom < DEGENERATE_TOTAL:
        raise DegenerateReferenceError("degenerate reference frame: total intensity below 1e-9")
    return float(model.sum()) / denom


def build_leakage_model(loop: CineLoop) -> LeakageModel:
    """Fuse the pre-contrast frames into a per-pixel maximum model.

    The maximum dominates every individual pre-contrast frame, so
    subtracting the model from any of them yields exactly zero.
    """
    start, end = loop.pre_contrast
    model = loop.pre_contrast_frames.max(axis=0)
    return LeakageModel(
        model=model,
        source_range=(start, end),
        reference_index=reference_frame_index(loop),
        spread_ratio=spread_ratio(loop, model),
    )


def subtract_leakage(frame: np.ndarray, model: np.ndarray) -> np.ndarray:
    """Clamped subtraction: out[p] = max(0, frame[p] - model[p])."""
    frame = np.asarray(frame, dtype=np.float64)
    model = np.asarray(model, dtype=np.float64)
    if frame.shape != model.shape:
        raise ValueError(f"frame shape {frame.shape} does not match model shape {model.shape}")
    return np.maximum(frame - model, 0.0)
