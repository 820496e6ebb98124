"""Sampled channel instances and allocation vectors."""

from dataclasses import dataclass, field

import numpy as np

from .gib_core import spectral_info_density

__all__ = ["ChannelGrid", "Allocation", "evaluate"]


@dataclass(frozen=True)
class ChannelGrid:
    """Squared channel gain sampled on a uniform frequency grid.

    ``h2[i]`` is |H(f_i)|^2 at the bin center ``f_i = (i + 1/2) * df`` with
    ``df = w / n_bins``.
    """

    w: float
    h2: np.ndarray

    def __post_init__(self):
        h2 = np.asarray(self.h2, dtype=np.float64)
        object.__setattr__(self, "h2", h2)
        if not self.w > 0:
            raise ValueError(f"bandwidth w must be > 0, got {self.w}")
        if h2.ndim != 1 or h2.size < 1:
            raise ValueError("h2 must be a non-empty 1-D vector")
        if np.any(~np.isfinite(h2)) or np.any(h2 < 0):
            raise ValueError("h2 must be finite and >= 0")

    @property
    def n_bins(self):
        return self.h2.size

    @property
    def df(self):
        return self.w / self.n_bins

    @property
    def f(self):
        return (np.arange(self.n_bins) + 0.5) * self.df


@dataclass(frozen=True)
class Allocation:
    """Per-bin power/rate densities with their totals.

    ``s`` in Watt/Hz, ``c`` in nats/s/Hz, ``active`` flags bins carrying
    resources.  ``total_power``/``total_rate``/``info`` are the Riemann sums
    over the grid; build through :meth:`from_vectors` to keep them consistent.
    """

    s: np.ndarray
    c: np.ndarray
    active: np.ndarray
    df: float
    total_power: float = field(default=0.0)
    total_rate: float = field(default=0.0)
    info: float = field(default=0.0)

    @classmethod
    def from_vectors(cls, grid, s, c, active=None):
        s = np.asarray(s, dtype=np.float64)
        c = np.asarray(c, dtype=np.float64)
        if s.shape != grid.h2.shape or c.shape != grid.h2.shape:
            raise ValueError("allocation vectors must match the grid")
        if active is None:
            active = (s > 0) | (c > 0)
        active = np.asarray(active, dtype=bool)
        s = np.where(active, s, 0.0)
        c = np.where(active, c, 0.0)
        df = grid.df
        info = float(np.sum(spectral_info_density(s, grid.h2, c)) * df)
        return cls(
            s=s,
            c=c,
            active=active,
            df=df,
            total_power=float(s.sum() * df),
            total_rate=float(c.sum() * df),
            info=info,
        )

    @classmethod
    def zero(cls, grid):
        z = np.zeros_like(grid.h2)
        return cls.from_vectors(grid, z, z, active=np.zeros(grid.n_bins, bool))


def evaluate(grid, allocation):
    """Total mutual information rate (nats/s) of an allocation on a grid."""
    dens = spectral_info_density(allocation.s, grid.h2, allocation.c)
    return float(np.sum(dens) * grid.df)
