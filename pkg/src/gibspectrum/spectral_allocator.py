"""Joint power/rate spectrum solver over a sampled channel.

Maximizes the total mutual-information rate

    integral ln((1 + s(f) h2(f)) / (1 + s(f) h2(f) exp(-c(f)))) df

subject to equality budgets on total power and total fronthaul rate.  The
per-bin maximizer of the dual (Lagrangian) density is either the concave
interior stationary point or the (0, 0) corner, so the solver searches the
multiplier box with nested bisections:

1. dual search: outer bisection on lambda_c, inner bisection on lambda_s
   enforcing the power budget, bins gated by positive Lagrangian density;
2. tie-breaking: when the gated totals jump across the power target (the
   dual is degenerate, e.g. on flat channels where all bins activate at
   once), near-marginal bins are activated greedily to fill the budget;
3. primal polish: with the active set frozen, a second nested bisection
   (no gating) drives both residuals to tolerance; a few neighbouring
   active-set sizes are tried and the best information kept.

Both monotonicity assumptions behind the bisections are verified on the
instance at startup; on failure the dual search falls back to a coarse
multiplier grid scan plus a Nelder-Mead polish of the residuals.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from ._kernels import branch_candidates
from .baselines import water_pouring
from .branch_analysis import MultiplierPair, multipliers_from_point
from .channel import Allocation, ChannelGrid, evaluate
from .errors import InfeasibleChannelError, NonConvergenceError

__all__ = [
    "SolveReport",
    "allocate_at_multipliers",
    "solve",
    "evaluate",
    "ChannelGrid",
    "Allocation",
]

_LAM_C_MIN = 1e-300
_LAM_C_MAX = 1.0 - 1e-9
_LN2 = math.log(2.0)
_SAT_MARGIN = 60.0  # nats/s/Hz beyond which exp(-c) is numerically zero


@dataclass(frozen=True)
class SolveReport:
    allocation: Allocation
    multipliers: MultiplierPair
    residual_power: float
    residual_rate: float
    iterations: int
    converged: bool
    rate_saturated: bool = False
    tie_broken: bool = False


def allocate_at_multipliers(grid, m):
    """Pointwise dual maximizer at fixed multipliers.

    A bin is active iff the concave interior candidate exists and its
    Lagrangian density beats the zero corner strictly.
    """
    m.require_interior()
    s, c, ldens, valid = branch_candidates(grid.h2, m.lambda_s, m.lambda_c)
    active = valid & (ldens > 0.0)
    return Allocation.from_vectors(
        grid, np.where(active, s, 0.0), np.where(active, c, 0.0), active=active
    )


class _Counter:
    def __init__(self):
        self.n = 0


def _candidates(h2, lam_s, lam_c, counter):
    counter.n += 1
    return branch_candidates(h2, lam_s, lam_c)


def _gated_state(grid, lam_s, lam_c, p, counter):
    """Strictly-gated totals plus greedy marginal fill toward power ``p``.

    Returns (active, s, c, power, rate).  The fill adds not-quite-profitable
    bins in decreasing Lagrangian-density order until the power budget is
    met as closely as the bin quantization allows.
    """
    df = grid.df
    s, cden, ldens, valid = _candidates(grid.h2, lam_s, lam_c, counter)
    strict = valid & (ldens > 0.0)
    power = float(s[strict].sum() * df)
    active = strict.copy()
    if power < p:
        pool = np.flatnonzero(valid & ~strict)
        if pool.size:
            pool = pool[np.argsort(-ldens[pool], kind="stable")]
            cum = np.cumsum(s[pool]) * df
            k = int(np.searchsorted(cum, p - power))
            # keep whichever count lands closer to the budget
            below = power + (cum[k - 1] if k > 0 else 0.0)
            if k < pool.size:
                above = power + cum[k]
                k = k + 1 if abs(above - p) < abs(p - below) else k
            active[pool[:k]] = True
            power = float(s[active].sum() * df)
    rate = float(cden[active].sum() * df)
    return active, s, cden, power, rate


def _inner_power(grid, lam_c, p, rtol, max_levels, counter, gated=True, mask=None):
    """Bisect lambda_s (log domain) so the offered power crosses ``p``.

    With ``gated`` the offered power counts strictly-profitable bins; with a
    ``mask`` all masked bins are forced (None is returned when some forced
    bin has no candidate on the low-power side, i.e. the set cannot shed
    enough power at this lambda_c).
    """
    df = grid.df
    h2max = float(grid.h2.max())

    def offered(lam_s):
        s, cden, ldens, valid = _candidates(grid.h2, lam_s, lam_c, counter)
        if gated:
            act = valid & (ldens > 0.0)
        else:
            act = mask
            if not valid[mask].all():
                return None, None
        return float(s[act].sum() * df), float(cden[act].sum() * df)

    hi = math.log(h2max * (1.0 - lam_c)) if gated else None
    if not gated:
        # forced candidates vanish at lam_s = h2*(1 - sqrt(lam_c))^2
        hi = math.log(float(grid.h2[mask].min()) * (1.0 - math.sqrt(lam_c)) ** 2)
    hi -= 1e-12
    pw_hi, _ = offered(math.exp(hi))
    if pw_hi is None or pw_hi > p:
        if gated:
            raise AssertionError("gated power must vanish at the branch edge")
        return None  # forced set cannot shed enough power here

    lo = hi - 40.0
    for _ in range(12):
        pw_lo, _ = offered(math.exp(lo))
        if pw_lo is not None and pw_lo >= p:
            break
        lo -= 40.0
    else:
        return None

    for _ in range(max_levels):
        mid = 0.5 * (lo + hi)
        pw, _ = offered(math.exp(mid))
        if pw is None:
            hi = mid
            continue
        if pw >= p:
            lo = mid
        else:
            hi = mid
        if abs(pw - p) <= rtol * p or hi - lo < 1e-15:
            break
    return math.exp(hi)


def _monotone(seq, slack):
    arr = np.asarray(seq)
    return bool(np.all(np.diff(arr) <= slack))


def _check_monotonicity(grid, p, counter):
    """Empirical sanity checks behind the nested bisection."""
    df = grid.df
    h2max = float(grid.h2.max())
    lam_c = 0.3
    powers = []
    for lam_s in np.exp(np.linspace(math.log(h2max) - 20, math.log(h2max * 0.69), 16)):
        s, _, ldens, valid = _candidates(grid.h2, lam_s, lam_c, counter)
        act = valid & (ldens > 0.0)
        powers.append(float(s[act].sum() * df))
    if not _monotone(powers, 1e-9 * max(max(powers), 1.0)):
        return False
    rates = []
    for v in np.linspace(math.log(1e-8), math.log(0.95), 8):
        lam_s = _inner_power(grid, math.exp(v), p, 1e-6, 80, counter)
        if lam_s is None:
            return False
        _, _, _, _, rate = _gated_state(grid, lam_s, math.exp(v), p, counter)
        rates.append(rate)
    return _monotone(rates, 1e-9 * max(max(rates), 1.0))


def _dual_bisect(grid, p, c, power_rtol, rate_rtol, max_levels, counter):
    """Nested bisection for the gated dual; returns (lam_s, lam_c)."""

    def rate_at(v):
        lam_c = math.exp(v)
        lam_s = _inner_power(grid, lam_c, p, power_rtol, max_levels, counter)
        if lam_s is None:
            return None, math.inf  # could not spend the power: rate side high
        _, _, _, _, rate = _gated_state(grid, lam_s, lam_c, p, counter)
        return lam_s, rate

    v_lo, v_hi = math.log(_LAM_C_MIN), math.log(_LAM_C_MAX)
    lam_s_lo, r_lo = rate_at(v_lo)
    if r_lo < c:
        raise NonConvergenceError(
            f"rate budget {c} unreachable even at vanishing lambda_c "
            f"(max {r_lo}); instance beyond floating-point multiplier range"
        )
    _, r_hi = rate_at(v_hi)
    if r_hi > c:
        raise NonConvergenceError(
            f"rate budget {c} below the deliverable minimum {r_hi} "
            "(less than one bin at the ln 2 floor)"
        )
    lam_s_best = lam_s_lo
    v_best = v_lo
    for _ in range(max_levels):
        v = 0.5 * (v_lo + v_hi)
        lam_s, r = rate_at(v)
        if r >= c:
            v_lo = v
            if lam_s is not None:
                lam_s_best, v_best = lam_s, v
        else:
            v_hi = v
            if lam_s is not None and abs(r - c) <= rate_rtol * c:
                lam_s_best, v_best = lam_s, v
                break
        if v_hi - v_lo < 1e-14 * max(1.0, abs(v_lo)):
            break
    return lam_s_best, math.exp(v_best)


def _dual_scan(grid, p, c, counter):
    """Coarse 128x128 multiplier grid scan plus Nelder-Mead residual polish."""
    df = grid.df
    h2max = float(grid.h2.max())

    def residual(u, v):
        lam_s, lam_c = math.exp(u), math.exp(v)
        if lam_c >= 1.0:
            return math.inf
        s, cden, ldens, valid = _candidates(grid.h2, lam_s, lam_c, counter)
        act = valid & (ldens > 0.0)
        rp = abs(float(s[act].sum() * df) - p) / p
        rc = abs(float(cden[act].sum() * df) - c) / c
        return max(rp, rc)

    us = np.linspace(math.log(h2max) - 60.0, math.log(h2max), 128)
    vs = np.linspace(math.log(1e-30), math.log(_LAM_C_MAX), 128)
    best = (math.inf, us[0], vs[0])
    for u in us:
        for v in vs:
            r = residual(u, v)
            if r < best[0]:
                best = (r, u, v)
    res = minimize(
        lambda x: residual(x[0], x[1]),
        x0=np.array(best[1:]),
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-12, "maxiter": 400},
    )
    u, v = res.x
    return math.exp(u), math.exp(min(v, math.log(_LAM_C_MAX)))


def _solve_fixed_set(grid, mask, p, c, max_levels, counter, v_hint=None):
    """Meet both budgets exactly on a frozen active set (no gating).

    Returns (allocation, multipliers, residual_power, residual_rate) or None
    when the set cannot carry the budgets (e.g. its rate floor exceeds c).
    """
    df = grid.df
    k = int(mask.sum())
    if k == 0 or np.any(grid.h2[mask] <= 0.0):
        return None
    if k == 1:
        s_den, c_den = p / df, c / df
        if c_den < _LN2:
            return None
        i = int(np.flatnonzero(mask)[0])
        s = np.zeros_like(grid.h2)
        cv = np.zeros_like(grid.h2)
        s[i], cv[i] = s_den, c_den
        alloc = Allocation.from_vectors(grid, s, cv, active=mask)
        m = multipliers_from_point(s_den, c_den, grid.h2[i])
        return alloc, m, 0.0, 0.0

    def rate_at(v):
        lam_c = math.exp(v)
        lam_s = _inner_power(
            grid, lam_c, p, 1e-12, max_levels, counter, gated=False, mask=mask
        )
        if lam_s is None:
            return None, -math.inf  # cannot meet power: lambda_c too large
        s, cden, _, valid = _candidates(grid.h2, lam_s, lam_c, counter)
        return lam_s, float(cden[mask].sum() * df)

    v_lo = math.log(_LAM_C_MIN)
    v_hi = math.log(_LAM_C_MAX)
    if v_hint is not None:
        lo_try = max(v_lo, v_hint - 8.0)
        _, r = rate_at(lo_try)
        if r >= c:
            v_lo = lo_try
    _, r_lo = rate_at(v_lo)
    if r_lo < c:
        return None
    lam_s_fin = None
    v_fin = None
    for _ in range(max_levels):
        v = 0.5 * (v_lo + v_hi)
        lam_s, r = rate_at(v)
        if r >= c:
            v_lo = v
            lam_s_fin, v_fin = lam_s, v
        else:
            v_hi = v
        if lam_s is not None and abs(r - c) <= 1e-9 * c:
            lam_s_fin, v_fin = lam_s, v
            break
        if v_hi - v_lo < 1e-15:
            break
    if lam_s_fin is None:
        return None
    lam_c = math.exp(v_fin)
    s, cden, _, valid = _candidates(grid.h2, lam_s_fin, lam_c, counter)
    if not valid[mask].all():
        return None
    alloc = Allocation.from_vectors(
        grid, np.where(mask, s, 0.0), np.where(mask, cden, 0.0), active=mask
    )
    rp = abs(alloc.total_power - p) / p
    rc = abs(alloc.total_rate - c) / c
    return alloc, MultiplierPair(lam_s_fin, lam_c), rp, rc


def _saturated_report(grid, p, c, counter):
    """C so large that the rate constraint is slack to machine precision."""
    wp = water_pouring(grid, p)
    n_sup = int(wp.support.sum())
    c_den = np.where(wp.support, c / (n_sup * grid.df), 0.0)
    alloc = Allocation.from_vectors(grid, wp.s, c_den, active=wp.support)
    rp = abs(alloc.total_power - p) / p
    rc = abs(alloc.total_rate - c) / c
    return SolveReport(
        allocation=alloc,
        multipliers=MultiplierPair(1.0 / wp.b, _LAM_C_MIN),
        residual_power=rp,
        residual_rate=rc,
        iterations=counter.n,
        converged=rp <= 1e-6 and rc <= 1e-6,
        rate_saturated=True,
    )


def solve(
    grid,
    p,
    c,
    *,
    power_rtol=1e-6,
    rate_rtol=1e-5,
    max_levels=200,
    dual_search="auto",
):
    """Optimal joint allocation of power ``p`` and fronthaul rate ``c``.

    Parameters
    ----------
    grid : ChannelGrid
    p, c : float
        Total power (Watt) and total rate (nats/s), both > 0.
    power_rtol, rate_rtol : float
        Relative residual targets of the inner/outer dual bisections.
    max_levels : int
        Bisection depth cap per level.
    dual_search : {"auto", "bisect", "scan"}
        "auto" verifies the monotonicity assumptions and falls back to the
        grid scan when they fail; the other values force one path.

    Raises
    ------
    InfeasibleChannelError
        If every bin has zero gain.
    NonConvergenceError
        If no feasible allocation within tolerance was found; the error
        carries the best attempt as ``report``.
    """
    if not isinstance(grid, ChannelGrid):
        grid = ChannelGrid(*grid)
    if not (p > 0 and c > 0):
        raise ValueError(f"need p > 0 and c > 0, got p={p}, c={c}")
    if not np.any(grid.h2 > 0):
        raise InfeasibleChannelError("all squared gains are zero")
    counter = _Counter()

    wp = water_pouring(grid, p)
    sat_rate = float(
        np.sum(_SAT_MARGIN + np.log1p(wp.s[wp.support] * grid.h2[wp.support]))
        * grid.df
    )
    if c >= sat_rate:
        return _saturated_report(grid, p, c, counter)

    if dual_search == "auto":
        dual_search = (
            "bisect" if _check_monotonicity(grid, p, counter) else "scan"
        )
    if dual_search == "bisect":
        lam_s, lam_c = _dual_bisect(
            grid, p, c, power_rtol, rate_rtol, max_levels, counter
        )
    elif dual_search == "scan":
        lam_s, lam_c = _dual_scan(grid, p, c, counter)
    else:
        raise ValueError(f"unknown dual_search {dual_search!r}")

    active, s, cden, power, rate = _gated_state(grid, lam_s, lam_c, p, counter)
    strict_rp = abs(power - p) / p
    strict_rc = abs(rate - c) / c
    s_dummy, _, ldens, valid = branch_candidates(grid.h2, lam_s, lam_c)
    tie_broken = bool(np.any(active & ~(valid & (ldens > 0.0))))

    # Candidate active sets: the tie-broken set and a few size variants
    # obtained by toggling the least-committed bins; for tiny grids,
    # enumerate every subset of live bins outright.
    masks = [active]
    order = np.flatnonzero(active)
    order = order[np.argsort(ldens[order], kind="stable")]  # weakest first
    pool = np.flatnonzero(valid & ~active)
    pool = pool[np.argsort(-ldens[pool], kind="stable")]
    for delta in (1, 2):
        if delta <= order.size and order.size - delta > 0:
            m = active.copy()
            m[order[:delta]] = False
            masks.append(m)
        if delta <= pool.size:
            m = active.copy()
            m[pool[:delta]] = True
            masks.append(m)
    live = np.flatnonzero(grid.h2 > 0)
    if live.size <= 6:
        for bits in range(1, 2 ** live.size):
            m = np.zeros(grid.n_bins, dtype=bool)
            m[live[[b for b in range(live.size) if bits >> b & 1]]] = True
            masks.append(m)

    seen = set()
    best = None
    v_hint = math.log(lam_c)
    for m in masks:
        key = m.tobytes()
        if key in seen:
            continue
        seen.add(key)
        got = _solve_fixed_set(grid, m, p, c, max_levels, counter, v_hint)
        if got is None:
            continue
        alloc, mult, rp, rc = got
        if rp > 1e-5 or rc > 1e-5:
            continue
        if best is None or alloc.info > best[0].info:
            best = (alloc, mult, rp, rc)

    if best is None:
        report = SolveReport(
            allocation=Allocation.from_vectors(
                grid, np.where(active, s, 0.0), np.where(active, cden, 0.0),
                active=active,
            ),
            multipliers=MultiplierPair(lam_s, lam_c),
            residual_power=strict_rp,
            residual_rate=strict_rc,
            iterations=counter.n,
            converged=False,
            tie_broken=tie_broken,
        )
        raise NonConvergenceError(
            "no active set met both budgets within tolerance "
            f"(best residuals: power {strict_rp:.3g}, rate {strict_rc:.3g})",
            report=report,
        )

    alloc, mult, rp, rc = best
    return SolveReport(
        allocation=alloc,
        multipliers=mult,
        residual_power=rp,
        residual_rate=rc,
        iterations=counter.n,
        converged=True,
        tie_broken=tie_broken,
    )
