"""Per-frequency stationary-point algebra for the joint (power, rate) problem.

At a single frequency with squared gain ``h2``, stationary points of the
Lagrangian density

    L(s, c) = ln((1 + s*h2) / (1 + s*h2*exp(-c))) - lam_s*s - lam_c*c

satisfy a quadratic in ``q = exp(-c)`` whose two roots form the psi = +1 and
psi = -1 solution branches.  Only the psi = +1 branch is concave in (s, c);
the non-concave branch is never optimal because splitting the band beats it.
The locus separating the two regions (the zero locus of the Hessian
determinant) is the dividing curve ``s = sqrt(lam_c)/(1 - sqrt(lam_c))``,
along which the rate density tends to ln 2 as lam_c -> 1: active bands never
carry less than 1 bit/s/Hz.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMultiplierError, IndeterminateRegionError

__all__ = [
    "MultiplierPair",
    "BranchSolution",
    "RegionLabel",
    "stationary_branches",
    "concave_allocation",
    "multipliers_from_point",
    "density_hessian",
    "classify_region",
    "dividing_curve",
    "region_map",
]


@dataclass(frozen=True)
class MultiplierPair:
    """Lagrange multipliers: ``lambda_s`` prices power, ``lambda_c`` rate."""

    lambda_s: float
    lambda_c: float

    def require_interior(self):
        if not (0.0 < self.lambda_c < 1.0):
            raise DegenerateMultiplierError(
                f"lambda_c must lie strictly in (0, 1), got {self.lambda_c}"
            )
        if not self.lambda_s > 0.0:
            raise DegenerateMultiplierError(
                f"lambda_s must be > 0, got {self.lambda_s}"
            )


@dataclass(frozen=True)
class BranchSolution:
    """One stationary branch point.

    ``s`` power density, ``q = exp(-c)`` compression factor, ``c`` rate
    density, ``psi`` the branch sign, ``x`` the quadratic's linear coefficient
    (kept for debugging).
    """

    s: float
    q: float
    c: float
    psi: int
    x: float


@dataclass(frozen=True)
class RegionLabel:
    psi: int
    concave: bool


def stationary_branches(h2, m):
    """Both stationary branch points at gain ``h2``, multipliers ``m``.

    Returns a list of zero, one (double root) or two :class:`BranchSolution`
    with valid power ``s > 0`` and compression ``0 < q <= 1``.  An empty list
    means the discriminant is negative or no root is admissible.
    """
    if not h2 > 0.0:
        raise ValueError(f"h2 must be > 0, got {h2}")
    m.require_interior()
    lam_s, lam_c = m.lambda_s, m.lambda_c

    x = h2 * (1.0 - lam_c) - lam_s
    disc = x * x - 4.0 * h2 * lam_c * lam_s
    if disc < 0.0:
        return []
    root = math.sqrt(disc)

    # Stable evaluation: the +root combinations directly, the -root ones via
    # the root products S1*S2 = lam_c/(h2*lam_s) and
    # Q1*Q2 = lam_s*lam_c/(h2*(1-lam_c)^2).
    s_plus = (x + root) / (2.0 * h2 * lam_s)
    q_minus = (x + root) / (2.0 * h2 * (1.0 - lam_c))
    if s_plus <= 0.0 or q_minus <= 0.0:
        return []
    q_plus = (lam_s * lam_c) / (h2 * (1.0 - lam_c) ** 2) / q_minus
    s_minus = lam_c / (h2 * lam_s) / s_plus

    out = []
    if 0.0 < q_plus <= 1.0:
        out.append(BranchSolution(s_plus, q_plus, -math.log(q_plus), +1, x))
    if root > 0.0 and s_minus > 0.0 and 0.0 < q_minus <= 1.0:
        out.append(BranchSolution(s_minus, q_minus, -math.log(q_minus), -1, x))
    return out


def concave_allocation(h2, m):
    """The psi = +1 (concave) branch as ``(s, c)``, or None if absent."""
    for sol in stationary_branches(h2, m):
        if sol.psi == +1:
            return sol.s, sol.c
    return None


def multipliers_from_point(s, c, h2=1.0):
    """Recover the multipliers supporting a stationary point ``(s, c)``.

    Inverts the stationarity conditions:
    ``lam_c = s*h2*q / (1 + s*h2*q)`` and
    ``lam_s = h2*(1 - q) / ((1 + s*h2)(1 + s*h2*q))`` with ``q = exp(-c)``.
    """
    if not (s > 0.0 and c > 0.0):
        raise ValueError(f"need s > 0 and c > 0, got s={s}, c={c}")
    q = math.exp(-c)
    shq = s * h2 * q
    lam_c = shq / (1.0 + shq)
    lam_s = h2 * (1.0 - q) / ((1.0 + s * h2) * (1.0 + shq))
    return MultiplierPair(lam_s, lam_c)


def density_hessian(s, c):
    """Hessian of the information density at ``(s, c)``, gain normalized to 1.

    Uses the exp(-c) closed forms

        d2/ds2 = -1/(1+s)^2 + q^2/(1+s*q)^2
        d2/dc2 = s^2 q^2/(1+s*q)^2 - s*q/(1+s*q)
        d2/dsdc = -s*q^2/(1+s*q)^2 + q/(1+s*q)

    with q = exp(-c).
    """
    if not (s > 0.0 and c >= 0.0):
        raise ValueError(f"need s > 0 and c >= 0, got s={s}, c={c}")
    q = math.exp(-c)
    d = 1.0 + s * q
    dss = -1.0 / (1.0 + s) ** 2 + q * q / (d * d)
    dcc = (s * q) ** 2 / (d * d) - s * q / d
    dsc = -s * q * q / (d * d) + q / d
    return np.array([[dss, dsc], [dsc, dcc]])


_BRANCH_MATCH_RTOL = 1e-6


def classify_region(s, c):
    """Which branch reproduces ``(s, c)`` and whether the density is concave.

    Recovers the supporting multipliers, re-solves the branch quadratic and
    matches ``s`` against the two roots (tolerance 1e-6 relative; a double
    root is labeled psi = +1).  Concavity is decided from the Hessian: both
    diagonal entries <= 0 and determinant >= 0.
    """
    if not (s > 0.0 and c > 0.0):
        raise ValueError(f"need s > 0 and c > 0, got s={s}, c={c}")
    m = multipliers_from_point(s, c)
    lam_s, lam_c = m.lambda_s, m.lambda_c
    x = (1.0 - lam_c) - lam_s
    disc = x * x - 4.0 * lam_c * lam_s
    if disc <= 0.0:
        # The point is itself a root, so a negative value is rounding noise
        # at a double root.
        psi = +1
    else:
        root = math.sqrt(disc)
        s_plus = (x + root) / (2.0 * lam_s)
        s_minus = lam_c / lam_s / s_plus
        err_plus = abs(s - s_plus) / s
        err_minus = abs(s - s_minus) / s
        if min(err_plus, err_minus) > _BRANCH_MATCH_RTOL:
            raise IndeterminateRegionError(
                f"neither branch reproduces (s={s}, c={c}): "
                f"roots {s_plus}, {s_minus}"
            )
        psi = +1 if err_plus <= err_minus else -1

    hess = density_hessian(s, c)
    det = hess[0, 0] * hess[1, 1] - hess[0, 1] * hess[1, 0]
    concave = hess[0, 0] <= 0.0 and hess[1, 1] <= 0.0 and det >= 0.0
    return RegionLabel(psi=psi, concave=concave)


def dividing_curve(lam_c):
    """Point ``(s, c)`` of the concavity/sign dividing curve at ``lam_c``.

    ``s = sqrt(lam_c)/(1 - sqrt(lam_c))``, ``c = -ln(sqrt(lam_c)/(1 + sqrt(lam_c)))``;
    ``c`` decreases to ln 2 as ``lam_c -> 1``.
    """
    if not 0.0 < lam_c < 1.0:
        raise ValueError(f"lam_c must lie in (0, 1), got {lam_c}")
    r = math.sqrt(lam_c)
    s = r / (1.0 - r)
    c = -math.log(r / (1.0 + r))
    return s, c


def region_map(s_values, c_values):
    """Tabulate branch sign, concavity and Hessian determinant on a grid.

    Returns a list of ``(s, c, psi, concave, det)`` tuples in row-major
    (s outer, c inner) order, for CSV export and region-coincidence checks.
    """
    rows = []
    for s in s_values:
        for c in c_values:
            label = classify_region(s, c)
            hess = density_hessian(s, c)
            det = float(hess[0, 0] * hess[1, 1] - hess[0, 1] * hess[1, 0])
            rows.append((float(s), float(c), label.psi, label.concave, det))
    return rows
