"""Flow suppression: temporal-window projections that separate free-flowing
contrast from stationary signal.

Windowing contract: window k of a loop with n frames and window length w
covers input samples k .. k+w-1 (0-based, k in [0, n-w]); the projected
sequence has n-w+1 frames and output k becomes available once input
k+w-1 has arrived. Partial head windows are not emitted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import CineLoop

PROJECTION_METHODS = ("minip", "perip", "stat")


@dataclass(frozen=True)
class WindowSpec:
    """Length of the temporal analysis window."""

    w: int = 20

    def __post_init__(self):
        if int(self.w) != self.w or self.w < 2:
            raise ValueError(f"window w: must be an integer >= 2, got {self.w!r}")
        object.__setattr__(self, "w", int(self.w))


@dataclass(frozen=True)
class WindowStats:
    """Mean, population sigma, and the mean-offset estimate for one window."""

    u: float
    sigma: float
    alpha: float
    s: float


def low_sample_count(percentile_p: float, w: int) -> int:
    """Number of retained low samples: max(1, ceil(p/100 * w))."""
    return min(w, max(1, math.ceil(percentile_p * w / 100.0)))


def _check_samples(samples, minimum: int) -> np.ndarray:
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"window samples must be 1-D, got shape {arr.shape}")
    if arr.size < minimum:
        raise ValueError(f"window needs at least {minimum} samples, got {arr.size}")
    return arr


def minip_window(samples) -> float:
    """Minimum intensity across the window."""
    arr = _check_samples(samples, 1)
    return float(arr.min())


def perip_window(samples, percentile_p: float = 20.0) -> float:
    """Mean of the weakest percentile_p percent of samples (at least one)."""
    arr = _check_samples(samples, 1)
    if not (0 < percentile_p <= 100):
        raise ValueError(f"percentile_p: must lie in (0, 100], got {percentile_p!r}")
    count = low_sample_count(percentile_p, arr.size)
    low = np.sort(arr)[:count]
    acc = low[0]
    for i in range(1, count):
        acc = acc + low[i]
    return float(acc / count)


def stat_window(samples, alpha: float = 2.7) -> WindowStats:
    """Mean-offset estimate for one window: s = max(0, u - alpha * sigma).

    sigma is the population standard deviation. Computation shifts samples
    by the first one, which is algebraically neutral but keeps constant
    windows exact.
    """
    arr = _check_samples(samples, 2)
    if not (math.isfinite(alpha) and alpha >= 0):
        raise ValueError(f"alpha: must be finite and >= 0, got {alpha!r}")
    w = arr.size
    base = arr[0]
    s1 = 0.0
    s2 = 0.0
    for i in range(1, w):
        d = arr[i] - base
        s1 += d
        s2 += d * d
    mu = s1 / w
    var = s2 / w - mu * mu
    if var < 0.0:
        var = 0.0
    u = base + mu
    sigma = math.sqrt(var)
    s = u - alpha * sigma
    if s < 0.0:
        s = 0.0
    return WindowStats(u=float(u), sigma=float(sigma), alpha=float(alpha), s=float(s))


def _as_stack(source) -> np.ndarray:
    if isinstance(source, CineLoop):
        return source.frames
    arr = np.asarray(source, dtype=np.float64)
    if arr.ndim != 3:
        raise ValueError(f"expected a CineLoop or a (n, h, w) stack, got shape {arr.shape}")
    return arr


def project_loop(
    loop,
    spec: WindowSpec | int = WindowSpec(),
    method: str = "stat",
    *,
    alpha: float = 2.7,
    percentile_p: float = 20.0,
    backend: str | None = None,
) -> np.ndarray:
    """Project every temporal window of a loop to a single frame per window.

    Returns a (n - w + 1, height, width) float64 stack. Output frame k is
    the projection of input frames k .. k+w-1 at every pixel.
    """
    if method not in PROJECTION_METHODS:
        raise ValueError(f"method: expected one of {PROJECTION_METHODS}, got {method!r}")
    if not isinstance(spec, WindowSpec):
        spec = WindowSpec(w=spec)
    stack = _as_stack(loop)
    n = stack.shape[0]
    if n < spec.w:
        raise ValueError(f"loop shorter than window: {n} frames < w={spec.w}")
    stack = np.ascontiguousarray(stack)
    if method == "minip":
        return kernels.window_min(stack, spec.w, backend=backend)
    if method == "perip":
        if not (0 < percentile_p <= 100):
            raise ValueError(f"percentile_p: must lie in (0, 100], got {percentile_p!r}")
        return kernels.window_low_mean(stack, spec.w, low_sample_count(percentile_p, spec.w), backend=backend)
    if not (math.isfinite(alpha) and alpha >= 0):
        raise ValueError(f"alpha: must be finite and >= 0, got {alpha!r}")
    mean, sigma = kernels.window_stats(stack, spec.w, backend=backend)
    est = mean - alpha * sigma
    np.maximum(est, 0.0, out=est)
    return est


def extract_time_series(
    source,
    *,
    pixel: tuple[int, int] | None = None,
    roi_mask: np.ndarray | None = None,
    method: str = "stat",
    spec: WindowSpec | int = WindowSpec(),
    alpha: float = 2.7,
    percentile_p: float = 20.0,
) -> list[tuple[int, float]]:
    """Per-output-frame intensity at a pixel or averaged over an ROI mask.

    source may be a CineLoop (projected first unless method is "none") or
    an already-projected (n, h, w) stack, in which case method is ignored
    and values are read off directly. Returns [(t, intensity), ...] with t
    the output frame index.
    """
    if (pixel is None) == (roi_mask is None):
        raise ValueError("exactly one of pixel or roi_mask is required")
    if isinstance(source, CineLoop):
        if method == "none":
            frames = source.frames
        else:
            frames = project_loop(source, spec, method, alpha=alpha, percentile_p=percentile_p)
    else:
        frames = _as_stack(source)
    _, h, w = frames.shape
    if pixel is not None:
        x, y = int(pixel[0]), int(pixel[1])
        if not (0 <= x < w and 0 <= y < h):
            raise ValueError(f"pixel ({x}, {y}) out of bounds for {w}x{h} frames")
        values = frames[:, y, x]
    else:
        mask = np.asarray(roi_mask, dtype=bool)
        if mask.shape != (h, w):
            raise ValueError(f"roi mask shape {mask.shape} does not match frames {(h, w)}")
        if not mask.any():
            raise ValueError("roi mask is empty")
        values = frames[:, mask].mean(axis=1)
    return [(int(t), float(v)) for t, v in enumerate(values)]
