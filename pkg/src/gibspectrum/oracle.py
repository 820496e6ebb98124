"""Brute-force reference optimizers for small instances.

Both oracles enumerate every equality split of the two budgets over a
discrete simplex (``steps`` ticks per axis) and evaluate the exact
objective; they are deliberately independent of the solvers they check.
Equality splits suffice because the objective increases in both resources.
Guard rails cap the instance size: the cross product grows as
``C(steps+n-1, n-1)^2``.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ._kernels import pair_scan_max

__all__ = ["OracleResult", "grid_oracle_continuous", "grid_oracle_discrete"]


@dataclass(frozen=True)
class OracleResult:
    s: np.ndarray
    c: np.ndarray
    objective: float
    steps: int


def _compositions(total, parts):
    """All integer vectors of length ``parts`` summing to ``total``."""
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    out = []
    for bars in combinations(range(total + parts - 1), parts - 1):
        prev = -1
        row = []
        for b in bars:
            row.append(b - prev - 1)
            prev = b
        row.append(total + parts - 2 - prev)
        out.append(row)
    return np.array(out, dtype=np.int64)


def _check_steps(steps):
    if steps < 20:
        raise ValueError(f"steps must be >= 20, got {steps}")


def grid_oracle_continuous(grid, p, c, steps=60):
    """Exhaustive search over power/rate splits on a sampled channel.

    Splits ``p`` and ``c`` over the bins in units of ``p/steps`` and
    ``c/steps`` and maximizes the Riemann-sum information.  Restricted to
    ``n_bins <= 4``.
    """
    n = grid.n_bins
    if n > 4:
        raise ValueError(f"continuous oracle limited to 4 bins, got {n}")
    _check_steps(steps)
    df = grid.df
    splits = _compositions(steps, n).astype(np.float64) / steps
    s_grid = splits * (p / df)  # power densities per split
    c_grid = splits * (c / df)
    gain_p = s_grid * grid.h2[None, :]
    expc_c = np.exp(-c_grid)
    jp, jc, val = pair_scan_max(gain_p, expc_c, df)
    return OracleResult(
        s=s_grid[jp].copy(), c=c_grid[jc].copy(), objective=float(val), steps=steps
    )


def grid_oracle_discrete(chan, p, c, steps=60):
    """Exhaustive search over per-mode powers and per-use rates."""
    n = chan.n
    if n > 3:
        raise ValueError(f"discrete oracle limited to 3 modes, got {n}")
    _check_steps(steps)
    splits = _compositions(steps, n).astype(np.float64) / steps
    x2_grid = splits * p
    c_grid = splits * c
    gain_p = x2_grid * chan.lambdas[None, :]
    expc_c = np.exp(-2.0 * c_grid)
    jp, jc, val = pair_scan_max(gain_p, expc_c, 0.5)
    return OracleResult(
        s=x2_grid[jp].copy(), c=c_grid[jc].copy(), objective=float(val), steps=steps
    )
