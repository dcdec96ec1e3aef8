"""Numba-accelerated kernels.

Arithmetic matches mceus.kernels.numpy_kernels exactly: same shift, same
per-window accumulation order, no fastmath, so outputs are bit-identical
across backends and across thread schedules (each pixel is independent).
"""
from __future__ import annotations

import os

import numba
import numpy as np
from numba import njit, prange

BACKEND_NAME = "numba"


def _apply_thread_cap() -> None:
    raw = os.environ.get("MCEUS_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        return
    if n > 0:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


_apply_thread_cap()


@njit(cache=True, parallel=True)
def _window_stats(stack, w):
    n, h, wd = stack.shape
    m = n - w + 1
    mean = np.empty((m, h, wd), dtype=np.float64)
    sigma = np.empty((m, h, wd), dtype=np.float64)
    for y in prange(h):
        buf = np.empty(n, dtype=np.float64)
        for x in range(wd):
            for t in range(n):
                buf[t] = stack[t, y, x]
            for k in range(m):
                base = buf[k]
                s1 = 0.0
                s2 = 0.0
                for i in range(1, w):
                    d = buf[k + i] - base
                    s1 += d
                    s2 += d * d
                mu = s1 / w
                var = s2 / w - mu * mu
                if var < 0.0:
                    var = 0.0
                mean[k, y, x] = base + mu
                sigma[k, y, x] = np.sqrt(var)
    return mean, sigma


@njit(cache=True, parallel=True)
def _window_min(stack, w):
    n, h, wd = stack.shape
    m = n - w + 1
    out = np.empty((m, h, wd), dtype=np.float64)
    for y in prange(h):
        buf = np.empty(n, dtype=np.float64)
        for x in range(wd):
            for t in range(n):
                buf[t] = stack[t, y, x]
            for k in range(m):
                lo = buf[k]
                for i in range(1, w):
                    v = buf[k + i]
                    if v < lo:
                        lo = v
                out[k, y, x] = lo
    return out


@njit(cache=True, parallel=True)
def _window_low_mean(stack, w, count):
    n, h, wd = stack.shape
    m = n - w + 1
    out = np.empty((m, h, wd), dtype=np.float64)
    for y in prange(h):
        buf = np.empty(n, dtype=np.float64)
        keep = np.empty(count, dtype=np.float64)
        for x in range(wd):
            for t in range(n):
                buf[t] = stack[t, y, x]
            for k in range(m):
                # sorted buffer of the count smallest seen so far; most
                # samples fail the keep[count-1] test and cost one compare
                size = 0
                for i in range(w):
                    v = buf[k + i]
                    if size < count:
                        j = size
                        size += 1
                    elif v < keep[count - 1]:
                        j = count - 1
                    else:
                        continue
                    while j > 0 and keep[j - 1] > v:
                        keep[j] = keep[j - 1]
                        j -= 1
                    keep[j] = v
                acc = keep[0]
                for i in range(1, count):
                    acc += keep[i]
                out[k, y, x] = acc / count
    return out


@njit(cache=True, parallel=True)
def _grey_dilate(frame, offsets):
    h, w = frame.shape
    k = offsets.shape[0]
    out = np.empty((h, w), dtype=np.float64)
    for y in prange(h):
        for x in range(w):
            best = frame[y, x]
            for i in range(k):
                sy = y - offsets[i, 0]
                sx = x - offsets[i, 1]
                if 0 <= sy < h and 0 <= sx < w:
                    v = frame[sy, sx]
                    if v > best:
                        best = v
            out[y, x] = best
    return out


@njit(cache=True, parallel=True)
def _grey_erode(frame, offsets):
    h, w = frame.shape
    k = offsets.shape[0]
    out = np.empty((h, w), dtype=np.float64)
    for y in prange(h):
        for x in range(w):
            best = frame[y, x]
            for i in range(k):
                sy = y - offsets[i, 0]
                sx = x - offsets[i, 1]
                if 0 <= sy < h and 0 <= sx < w:
                    v = frame[sy, sx]
                    if v < best:
                        best = v
            out[y, x] = best
    return out


def window_stats(stack: np.ndarray, w: int) -> tuple[np.ndarray, np.ndarray]:
    return _window_stats(stack, w)


def window_min(stack: np.ndarray, w: int) -> np.ndarray:
    return _window_min(stack, w)


def window_low_mean(stack: np.ndarray, w: int, count: int) -> np.ndarray:
    return _window_low_mean(stack, w, count)


def grey_dilate(frame: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    return _grey_dilate(frame, offsets)


def grey_erode(frame: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    return _grey_erode(frame, offsets)
