"""Pure-numpy kernel implementations.

These mirror the numba kernels operation for operation, including the
per-window summation order, so both backends produce identical bits.
"""
from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def window_stats(stack: np.ndarray, w: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel mean and population sigma over every length-w window.

    Samples are shifted by the window's first sample before accumulation;
    this keeps constant windows exact (sigma == 0, mean == the constant).
    """
    n = stack.shape[0]
    m = n - w + 1
    mean = np.empty((m,) + stack.shape[1:], dtype=np.float64)
    sigma = np.empty_like(mean)
    for k in range(m):
        base = stack[k]
        s1 = np.zeros_like(base)
        s2 = np.zeros_like(base)
        for i in range(1, w):
            d = stack[k + i] - base
            s1 += d
            s2 += d * d
        mu = s1 / w
        var = s2 / w - mu * mu
        np.maximum(var, 0.0, out=var)
        mean[k] = base + mu
        sigma[k] = np.sqrt(var)
    return mean, sigma


def window_min(stack: np.ndarray, w: int) -> np.ndarray:
    n = stack.shape[0]
    m = n - w + 1
    out = np.empty((m,) + stack.shape[1:], dtype=np.float64)
    for k in range(m):
        acc = stack[k].copy()
        for i in range(1, w):
            np.minimum(acc, stack[k + i], out=acc)
        out[k] = acc
    return out


def window_low_mean(stack: np.ndarray, w: int, count: int) -> np.ndarray:
    """Per-pixel mean of the count smallest samples in every length-w window."""
    n = stack.shape[0]
    m = n - w + 1
    out = np.empty((m,) + stack.shape[1:], dtype=np.float64)
    for k in range(m):
        low = np.sort(stack[k:k + w], axis=0)[:count]
        acc = low[0].copy()
        for i in range(1, count):
            acc += low[i]
        out[k] = acc / count
    return out


def grey_dilate(frame: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Grayscale dilation restricted to valid pixels (no padding)."""
    h, w = frame.shape
    out = frame.copy()
    for dy, dx in offsets:
        if dy == 0 and dx == 0:
            continue
        y0, y1 = max(0, dy), h + min(0, dy)
        x0, x1 = max(0, dx), w + min(0, dx)
        if y0 >= y1 or x0 >= x1:
            continue
        np.maximum(out[y0:y1, x0:x1], frame[y0 - dy:y1 - dy, x0 - dx:x1 - dx], out=out[y0:y1, x0:x1])
    return out


def grey_erode(frame: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Grayscale erosion restricted to valid pixels (no padding)."""
    h, w = frame.shape
    out = frame.copy()
    for dy, dx in offsets:
        if dy == 0 and dx == 0:
            continue
        y0, y1 = max(0, dy), h + min(0, dy)
        x0, x1 = max(0, dx), w + min(0, dx)
        if y0 >= y1 or x0 >= x1:
            continue
        np.minimum(out[y0:y1, x0:x1], frame[y0 - dy:y1 - dy, x0 - dx:x1 - dx], out=out[y0:y1, x0:x1])
    return out
