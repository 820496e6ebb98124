"""Comparison allocators: water-pouring, uniform, limited-rate WP, flat sweep."""

import math
from dataclasses import dataclass

import numpy as np

from .channel import Allocation
from .errors import InfeasibleChannelError

__all__ = [
    "WaterPouringResult",
    "water_pouring",
    "uniform_allocation",
    "limited_rate_wp",
    "flat_band_sweep",
]


@dataclass(frozen=True)
class WaterPouringResult:
    s: np.ndarray
    b: float
    info_inf: float
    support: np.ndarray


def water_pouring(grid, p, rtol=1e-10, max_iter=200):
    """Classical water-pouring ``s_i = max(b - 1/h2_i, 0)`` spending power ``p``.

    The water level ``b`` is found by bisection on the total power, which is
    continuous and strictly increasing in ``b``.  ``info_inf`` is the
    uncompressed information rate ``sum(ln(b * h2_i))`` over the support.
    """
    if not p > 0:
        raise ValueError(f"total power must be > 0, got {p}")
    h2 = grid.h2
    if not np.any(h2 > 0):
        raise InfeasibleChannelError("all squared gains are zero")
    df = grid.df
    pos = h2 > 0
    inv = np.zeros_like(h2)
    inv[pos] = 1.0 / h2[pos]

    def total(b):
        return float(np.sum(np.maximum(b - inv[pos], 0.0)) * df)

    lo = float(inv[pos].min())  # water below the best channel: zero power
    hi = lo + p / df + 1.0
    while total(hi) < p:
        hi *= 2.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if total(mid) < p:
            lo = mid
        else:
            hi = mid
        if abs(total(mid) - p) <= rtol * p:
            break
    b = 0.5 * (lo + hi)

    s = np.zeros_like(h2)
    s[pos] = np.maximum(b - inv[pos], 0.0)
    support = s > 0
    info_inf = float(np.sum(np.log(b * h2[support])) * df)
    return WaterPouringResult(s=s, b=b, info_inf=info_inf, support=support)


def uniform_allocation(grid, p, c):
    """Spread ``p`` and ``c`` evenly over the full instrument bandwidth.

    Dead bins (h2 = 0) receive their share too; that is the naive baseline's
    point.
    """
    if p < 0 or c < 0:
        raise ValueError("p and c must be >= 0")
    n = grid.n_bins
    s = np.full(n, p / grid.w)
    cden = np.full(n, c / grid.w)
    active = np.full(n, (p > 0) or (c > 0))
    return Allocation.from_vectors(grid, s, cden, active=active)


def limited_rate_wp(grid, p, c):
    """Water-pouring power with rate tied to it: ``c_i = (c/p) * s_i``."""
    if c < 0:
        raise ValueError("c must be >= 0")
    wp = water_pouring(grid, p)
    cden = (c / p) * wp.s
    return Allocation.from_vectors(grid, wp.s, cden, active=wp.support)


def _flat_band_info(b, p, c):
    x = p / b
    return b * (np.log1p(x) - np.log1p(x * np.exp(-c / b)))


def flat_band_sweep(p, c, w, n_samples=10_000):
    """Information rate of uniform (p, c) over a sub-band B of a flat channel.

    Sweeps ``B`` log-spaced over (0, w], then refines the maximizer by
    golden-section search.  Returns ``(b_grid, info_grid, b_star, info_star)``.
    """
    if not (p > 0 and c > 0 and w > 0):
        raise ValueError("p, c, w must be > 0")
    b_grid = np.logspace(math.log10(w) - 6.0, math.log10(w), n_samples)
    info_grid = _flat_band_info(b_grid, p, c)
    i = int(np.argmax(info_grid))
    lo = b_grid[max(i - 1, 0)]
    hi = b_grid[min(i + 1, n_samples - 1)]

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1 = _flat_band_info(x1, p, c)
    f2 = _flat_band_info(x2, p, c)
    for _ in range(200):
        if b - a < 1e-13 * w:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = _flat_band_info(x2, p, c)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = _flat_band_info(x1, p, c)
    b_star = 0.5 * (a + b)
    return b_grid, info_grid, float(b_star), float(_flat_band_info(b_star, p, c))
