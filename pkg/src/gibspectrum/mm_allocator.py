"""Finite-block allocator over Karhunen-Loeve eigenvalues.

Maximizes  1/2 * sum_n ln((1 + lam_n x_n^2) / (1 + lam_n x_n^2 e^{-2 C_n}))
over per-mode powers ``x_n^2`` (handled in log domain, ``x_n^2 = exp(l_n)``)
and per-use rates ``C_n >= 0`` under total power/rate budgets.  The negated
objective is a difference of the convex functions

    g = ln(1 + lam e^{l - 2C}),   f = ln(1 + lam e^{l}),

so each outer iteration replaces ``-f`` by its tangent at the current
iterate and minimizes the convex surrogate exactly
(majorization-minimization: the true objective can only improve).

The surrogate is solved on a fast path first: the stationarity system gives
a linear relation between the two multipliers, leaving a 1-D bisection on
nu_2 inside (and, when needed, geometrically beyond) its analytic bracket.
Whenever a non-negativity clamp activates, that relation breaks and the step
falls back to an exact 2-D dual bisection with per-mode convex subproblems.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GibSpectrumError, NonConvergenceError

__all__ = [
    "EigenChannel",
    "MMState",
    "dc_objective",
    "surrogate_info",
    "convexity_check",
    "mm_step",
    "mm_solve",
    "mm_solve_multistart",
]


@dataclass(frozen=True)
class EigenChannel:
    lambdas: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=np.float64)
        object.__setattr__(self, "lambdas", lam)
        if lam.ndim != 1 or lam.size < 1:
            raise ValueError("lambdas must be a non-empty 1-D vector")
        if np.any(~np.isfinite(lam)) or np.any(lam < 0):
            raise ValueError("lambdas must be finite and >= 0")

    @property
    def n(self):
        return self.lambdas.size


@dataclass(frozen=True)
class MMState:
    """One iterate: log-powers ``l``, per-use rates ``c``, step ``k``.

    ``nu1``/``nu2`` are the surrogate multipliers of the step that produced
    the iterate (0 for the initial state), kept for diagnostics.
    """

    l: np.ndarray
    c: np.ndarray
    k: int
    obj: float
    nu1: float = 0.0
    nu2: float = 0.0


def dc_objective(chan, l, c):
    """Information (nats) of log-powers ``l`` and per-use rates ``c``."""
    lam = chan.lambdas
    l = np.asarray(l, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    snr = lam * np.exp(l)
    return float(0.5 * np.sum(np.log1p(snr) - np.log1p(snr * np.exp(-2.0 * c))))


def surrogate_info(chan, l, c, l_ref):
    """Tangent minorant of :func:`dc_objective` taken at ``l_ref``.

    Equals the true objective at ``l = l_ref`` and is <= it elsewhere.
    """
    lam = chan.lambdas
    l = np.asarray(l, dtype=np.float64)
    l_ref = np.asarray(l_ref, dtype=np.float64)
    snr_ref = lam * np.exp(l_ref)
    fhat = np.log1p(snr_ref) + snr_ref / (1.0 + snr_ref) * (l - l_ref)
    g = np.log1p(lam * np.exp(l - 2.0 * np.asarray(c)))
    return float(0.5 * np.sum(fhat - g))


def convexity_check(chan, samples, rtol=1e-9):
    """Numerically verify convexity of both difference terms.

    ``samples`` is an iterable of ``(l, c)`` points, checked for every
    eigenvalue: Hessian of ``f`` is PSD with a zero rate-rate block, Hessian
    of ``g`` is a rank-1 PSD matrix with eigenvalue ratio {0, 5} relative to
    its scale factor.
    """
    for lam in chan.lambdas:
        if lam <= 0:
            continue
        for l, c in samples:
            # f depends on l only: hess_f = diag(t, 0) with t >= 0
            t = lam * math.exp(l) / (1.0 + lam * math.exp(l)) ** 2
            if t < -rtol:
                return False
            scale = (
                lam
                * math.exp(l + 2.0 * c)
                / (lam * math.exp(l) + math.exp(2.0 * c)) ** 2
            )
            hess_g = scale * np.array([[1.0, -2.0], [-2.0, 4.0]])
            eig = np.linalg.eigvalsh(hess_g)
            if abs(eig[0] / scale) > rtol or abs(eig[1] / scale - 5.0) > rtol:
                return False
    return True


def _alpha(lam, l):
    snr = lam * np.exp(l)
    return -snr / (1.0 + snr)


def _fast_step(lam, l, p, c, alpha):
    """Closed-form surrogate solve via the nu1 = -(2/N)(K/2 + nu2 P) relation.

    Returns ``(l_new, c_new, nu1, nu2)`` or None when the required bisection
    bracket cannot be established or any non-negativity clamp would bind.
    """
    n = lam.size
    big_k = float(alpha.sum())
    if big_k >= 0.0:
        return None

    def updates(nu2):
        psi = big_k + 2.0 * nu2 * p
        nu1 = -psi / n
        with np.errstate(divide="ignore"):
            e_l = (psi - n * alpha) / (2.0 * n * nu2)
            arg = -lam * (psi - n * alpha) * (psi + n) / (2.0 * n * nu2 * psi)
        return e_l, arg, nu1

    def total_rate(nu2):
        e_l, arg, _ = updates(nu2)
        if np.any(e_l <= 0.0) or np.any(arg <= 0.0):
            return None
        return float(np.sum(np.maximum(0.5 * np.log(arg), 0.0)))

    hi_pole = -big_k / (2.0 * p)  # psi -> 0-: rates diverge
    lo_stated = (-n * np.min(np.abs(alpha)) - big_k) / (2.0 * p)
    width = hi_pole - lo_stated
    lo = lo_stated + 1e-12 * width
    hi = hi_pole - 1e-12 * width

    # The analytic bracket is treated as a guess: expand geometrically
    # toward the pole on top and below the stated bound underneath (staying
    # in the validity region) until a sign change is enclosed.
    r_hi = total_rate(hi)
    expansions = 0
    while r_hi is not None and r_hi < c and expansions < 60:
        hi = hi_pole - (hi_pole - hi) * 0.25
        r_hi = total_rate(hi)
        expansions += 1
    r_lo = total_rate(lo)
    while r_lo is not None and r_lo > c and expansions < 80:
        step = hi_pole - lo
        lo = hi_pole - 2.0 * step
        r_lo = total_rate(lo)
        expansions += 1
    if r_hi is None or r_lo is None or r_lo > c or r_hi < c:
        return None

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r = total_rate(mid)
        if r is None:
            return None
        if r < c:
            lo = mid
        else:
            hi = mid
        if abs(r - c) <= 1e-12 * c:
            break
    nu2 = 0.5 * (lo + hi)
    e_l, arg, nu1 = updates(nu2)
    if nu1 <= 0.0 or nu2 <= 0.0:
        return None
    c_new = 0.5 * np.log(arg)
    if np.any(c_new <= 0.0):
        return None  # a clamp binds: the linear relation is invalid
    return np.log(e_l), c_new, nu1, nu2


def _modes_at(lam, alpha, nu1, nu2):
    """Exact per-mode surrogate minimizers at (nu1, nu2), vectorized.

    Interior modes pin the compressed SNR fraction to nu1; on the rest the
    rate clamps to zero and the power stationarity
    ``0.5*lam*u/(1+lam*u) + 0.5*alpha + nu2*u = 0`` is a quadratic in u
    with exactly one non-negative root.  Returns (powers, rates).
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        e_int = -(alpha + nu1) / (2.0 * nu2)
        arg = (1.0 - nu1) * lam * e_int / nu1
    interior = (e_int > 0.0) & (arg > 1.0)
    a = nu2 * lam
    b = 0.5 * lam * (1.0 + alpha) + nu2
    c0 = 0.5 * alpha
    u_clamped = -2.0 * c0 / (b + np.sqrt(b * b - 4.0 * a * c0))
    u = np.where(interior, e_int, u_clamped)
    rates = np.where(interior, 0.5 * np.log(np.where(interior, arg, 1.0)), 0.0)
    return u, rates


def _dual_2d_step(lam, p, c, alpha, nu_hint=None):
    """Exact surrogate solve: nested bisection on (nu1, nu2).

    Power decreases in nu2 at fixed nu1, total rate decreases in nu1 after
    power matching; ``nu_hint`` warm-starts the brackets from the previous
    iteration.
    """

    def power_matched(nu1):
        guess = nu_hint[1] if nu_hint else 1.0
        lo, hi = guess / 16.0, guess * 16.0
        for _ in range(60):
            if _modes_at(lam, alpha, nu1, hi)[0].sum() <= p:
                break
            hi *= 16.0
        for _ in range(60):
            if _modes_at(lam, alpha, nu1, lo)[0].sum() >= p:
                break
            lo /= 16.0
        nu2 = math.sqrt(lo * hi)
        for _ in range(200):
            nu2 = math.sqrt(lo * hi)
            pw = _modes_at(lam, alpha, nu1, nu2)[0].sum()
            if pw > p:
                lo = nu2
            else:
                hi = nu2
            if abs(pw - p) <= 1e-13 * p:
                break
        return nu2

    lo1, hi1 = 1e-14, 1.0 - 1e-14
    if nu_hint:
        if _modes_at(lam, alpha, min(nu_hint[0] * 8, hi1),
                     power_matched(min(nu_hint[0] * 8, hi1)))[1].sum() <= c:
            hi1 = min(nu_hint[0] * 8, hi1)
        if _modes_at(lam, alpha, nu_hint[0] / 8,
                     power_matched(nu_hint[0] / 8))[1].sum() >= c:
            lo1 = nu_hint[0] / 8
    nu1 = 0.5 * (lo1 + hi1)
    for _ in range(200):
        nu1 = 0.5 * (lo1 + hi1)
        nu2 = power_matched(nu1)
        rate = _modes_at(lam, alpha, nu1, nu2)[1].sum()
        if rate > c:
            lo1 = nu1
        else:
            hi1 = nu1
        if abs(rate - c) <= 1e-12 * c or hi1 - lo1 < 1e-17:
            break
    nu2 = power_matched(nu1)
    u, rates = _modes_at(lam, alpha, nu1, nu2)
    pw = float(u.sum())
    rate = float(rates.sum())
    if abs(pw - p) > 1e-6 * p or abs(rate - c) > 1e-6 * c:
        raise NonConvergenceError(
            f"surrogate dual bisection stalled (power {pw}, rate {rate})"
        )
    with np.errstate(divide="ignore"):
        ls = np.log(u)
    return ls, rates, nu1, nu2


def mm_step(chan, state, p, c):
    """One majorize-then-minimize step; the objective never decreases."""
    lam = chan.lambdas
    if not np.any(lam > 0):
        raise GibSpectrumError("degenerate instance: all eigenvalues are zero")
    live = lam > 0
    lam_live = lam[live]
    alpha = _alpha(lam_live, state.l[live])

    got = _fast_step(lam_live, state.l[live], p, c, alpha)
    if got is None:
        hint = (state.nu1, state.nu2) if state.nu1 > 0 and state.nu2 > 0 else None
        got = _dual_2d_step(lam_live, p, c, alpha, nu_hint=hint)
    l_live, c_live, nu1, nu2 = got

    l_new = np.full(lam.shape, -np.inf)
    c_new = np.zeros(lam.shape)
    l_new[live] = l_live
    c_new[live] = c_live
    obj = dc_objective(chan, l_new, c_new)
    return MMState(l=l_new, c=c_new, k=state.k + 1, obj=obj, nu1=nu1, nu2=nu2)


def _initial_state(chan, p, c, l=None, cc=None):
    n = chan.n
    l0 = np.full(n, math.log(p / n)) if l is None else np.asarray(l, float)
    c0 = np.full(n, c / n) if cc is None else np.asarray(cc, float)
    return MMState(l=l0, c=c0, k=0, obj=dc_objective(chan, l0, c0))


def mm_solve(chan, p, c, init=None, tol=1e-9, max_iter=500):
    """Iterate :func:`mm_step` to a stationary point.

    ``init`` may be an ``MMState`` or None for the uniform split.  Returns
    ``(state, converged)``; the objective trace is non-decreasing.
    """
    if not (p > 0 and c > 0):
        raise ValueError(f"need p > 0 and c > 0, got p={p}, c={c}")
    state = init if init is not None else _initial_state(chan, p, c)
    for _ in range(max_iter):
        nxt = mm_step(chan, state, p, c)
        if nxt.obj < state.obj - 1e-10:
            raise GibSpectrumError(
                f"MM ascent violated: {state.obj} -> {nxt.obj}"
            )
        done = abs(nxt.obj - state.obj) < tol
        state = nxt
        if done:
            return state, True
    return state, False


def mm_solve_multistart(chan, p, c, n_starts=5, seed=0, tol=1e-9, max_iter=500):
    """Best of the uniform init plus Dirichlet-random power splits.

    The problem is nonconvex; restarts hedge against symmetric saddle
    points (a symmetric init on equal eigenvalues stays symmetric forever).
    """
    rng = np.random.default_rng(seed)
    best = None
    for trial in range(n_starts):
        if trial == 0:
            init = _initial_state(chan, p, c)
        else:
            weights = rng.dirichlet(np.ones(chan.n))
            weights = np.maximum(weights, 1e-12)
            init = _initial_state(chan, p, c, l=np.log(p * weights))
        state, converged = mm_solve(chan, p, c, init=init, tol=tol, max_iter=max_iter)
        if best is None or state.obj > best[0].obj:
            best = (state, converged)
    return best
