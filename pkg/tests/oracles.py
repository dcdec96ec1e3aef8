"""Independent reference implementations used to check the package.

Everything here is written the slow, obvious way on purpose: per-pixel
loops, two passes where two passes are natural, no shared code with the
package under test. If a test disagrees with one of these, the package
is wrong until proven otherwise.
"""

import math

import numpy as np


def two_pass_window_stats(series, w, alpha):
    """Mean, population std, and clamped offset for every window of a 1-D series.

    Classic two-pass formulation: mean first, then squared deviations from
    that mean. Returns three lists of length len(series) - w + 1.
    """
    n = len(series)
    means, sigmas, ests = [], [], []
    for k in range(n - w + 1):
        window = [float(series[k + i]) for i in range(w)]
        u = sum(window) / w
        var = sum((x - u) ** 2 for x in window) / w
        sigma = math.sqrt(var)
        means.append(u)
        sigmas.append(sigma)
        ests.append(max(0.0, u - alpha * sigma))
    return means, sigmas, ests


def brute_window_min(series, w):
    n = len(series)
    return [min(float(series[k + i]) for i in range(w)) for k in range(n - w + 1)]


def brute_window_low_mean(series, w, p):
    """Mean of the k = max(1, ceil(p*w/100)) smallest samples per window."""
    count = max(1, math.ceil(p * w / 100.0))
    count = min(count, w)
    n = len(series)
    out = []
    for k in range(n - w + 1):
        window = sorted(float(series[k + i]) for i in range(w))
        out.append(sum(window[:count]) / count)
    return out


def disk_offsets(radius):
    offs = []
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            if dy * dy + dx * dx <= radius * radius:
                offs.append((dy, dx))
    return offs


def brute_dilate(frame, radius):
    """Max over the disk neighborhood, restricted to pixels inside the frame."""
    h, w = frame.shape
    offs = disk_offsets(radius)
    out = np.empty_like(frame)
    for y in range(h):
        for x in range(w):
            best = frame[y, x]
            for dy, dx in offs:
                yy, xx = y + dy, x + dx
                if 0 <= yy < h and 0 <= xx < w and frame[yy, xx] > best:
                    best = frame[yy, xx]
            out[y, x] = best
    return out


def brute_erode(frame, radius):
    h, w = frame.shape
    offs = disk_offsets(radius)
    out = np.empty_like(frame)
    for y in range(h):
        for x in range(w):
            best = frame[y, x]
            for dy, dx in offs:
                yy, xx = y + dy, x + dx
                if 0 <= yy < h and 0 <= xx < w and frame[yy, xx] < best:
                    best = frame[yy, xx]
            out[y, x] = best
    return out


def brute_close(frame, radius):
    return brute_erode(brute_dilate(frame, radius), radius)


def point_in_polygon(px, py, vertices):
    """Even-odd crossing test for a single point, textbook formulation."""
    inside = False
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        if (y1 > py) != (y2 > py):
            xint = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < xint:
                inside = not inside
    return inside


def brute_polygon_mask(vertices, width, height):
    mask = np.zeros((height, width), dtype=bool)
    for y in range(height):
        for x in range(width):
            mask[y, x] = point_in_polygon(x + 0.5, y + 0.5, vertices)
    return mask


def quantize_reference(value, maxval):
    """Round-half-up quantization of a [0,1] float to an integer level."""
    return int(math.floor(value * maxval + 0.5))
