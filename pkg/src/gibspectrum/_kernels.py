"""Hot numeric kernels with optional numba acceleration.

Every kernel exists in two functionally identical flavours:

* ``*_numpy`` -- vectorized / chunked pure-numpy reference implementation,
* a loop implementation compiled with ``numba.njit`` when available.

The public names (``branch_candidates``, ``pair_scan_max``) point at the
jitted versions unless the environment variable ``GIBSPECTRUM_NO_NUMBA`` is
set to a truthy value (or numba is not importable), in which case they fall
back to the numpy flavour.  ``benchmarks/bench_kernels.py`` compares the two
paths.
"""

import math
import os

import numpy as np

_flag = os.environ.get("GIBSPECTRUM_NO_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag in ("1", "true", "yes", "on")

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled by GIBSPECTRUM_NO_NUMBA")
    from numba import njit

    NUMBA_ENABLED = True
except ImportError:  # pragma: no cover - exercised via env flag in benchmarks
    NUMBA_ENABLED = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


_Q_FLOOR = 1e-320  # keeps -log(q) finite when lambda_c underflows


def branch_candidates_numpy(h2, lam_s, lam_c):
    """Per-bin interior stationary candidate on the concave branch.

    For each squared gain ``h2[i]`` evaluates the larger-power root of the
    stationarity quadratic at multipliers ``(lam_s, lam_c)`` and the pointwise
    Lagrangian density of that candidate.

    Returns ``(s, c, ldens, valid)`` where ``valid`` marks bins holding a
    real candidate with positive power; ``s``/``c``/``ldens`` are zero on
    invalid bins.  ``ldens > 0`` is the activation test against the (0, 0)
    corner whose density is exactly zero.

    The smaller q-root is recovered from the root product
    ``q1*q2 = lam_s*lam_c / (h2*(1-lam_c)^2)`` to avoid the cancellation in
    ``X - sqrt(disc)`` when ``lam_c`` is tiny.
    """
    h2 = np.asarray(h2, dtype=np.float64)
    x = h2 * (1.0 - lam_c) - lam_s
    disc = x * x - 4.0 * h2 * lam_c * lam_s
    valid = (h2 > 0.0) & (x > 0.0) & (disc >= 0.0)

    s = np.zeros_like(h2)
    c = np.zeros_like(h2)
    ldens = np.zeros_like(h2)
    if not valid.any():
        return s, c, ldens, valid

    hv = h2[valid]
    xv = x[valid]
    root = np.sqrt(disc[valid])
    s_v = (xv + root) / (2.0 * hv * lam_s)
    q_big = (xv + root) / (2.0 * hv * (1.0 - lam_c))
    q_v = (lam_s * lam_c) / (hv * (1.0 - lam_c) ** 2) / q_big
    q_v = np.clip(q_v, _Q_FLOOR, 1.0)
    c_v = -np.log(q_v)
    sh = s_v * hv
    dens = np.log1p(sh) - np.log1p(sh * q_v)
    s[valid] = s_v
    c[valid] = c_v
    ldens[valid] = dens - lam_s * s_v - lam_c * c_v
    return s, c, ldens, valid


@njit(cache=True)
def _branch_candidates_jit(h2, lam_s, lam_c):
    n = h2.shape[0]
    s = np.zeros(n)
    c = np.zeros(n)
    ldens = np.zeros(n)
    valid = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        h = h2[i]
        if h <= 0.0:
            continue
        x = h * (1.0 - lam_c) - lam_s
        if x <= 0.0:
            continue
        disc = x * x - 4.0 * h * lam_c * lam_s
        if disc < 0.0:
            continue
        root = math.sqrt(disc)
        si = (x + root) / (2.0 * h * lam_s)
        q_big = (x + root) / (2.0 * h * (1.0 - lam_c))
        qi = (lam_s * lam_c) / (h * (1.0 - lam_c) ** 2) / q_big
        if qi < _Q_FLOOR:
            qi = _Q_FLOOR
        elif qi > 1.0:
            qi = 1.0
        ci = -math.log(qi)
        sh = si * h
        dens = math.log1p(sh) - math.log1p(sh * qi)
        s[i] = si
        c[i] = ci
        ldens[i] = dens - lam_s * si - lam_c * ci
        valid[i] = True
    return s, c, ldens, valid


def pair_scan_max_numpy(gain_p, expc_c, weight):
    """Maximize ``sum_i w * log1p(g[jp,i]) - w * log1p(g[jp,i]*e[jc,i])``.

    ``gain_p`` has one row per enumerated power split (entries ``s_i * h2_i``
    or ``x_i^2 * lam_i``), ``expc_c`` one row per enumerated rate split
    (entries ``exp(-c_i)``).  Returns ``(best_jp, best_jc, best_value)`` over
    the full cross product.
    """
    gain_p = np.ascontiguousarray(gain_p, dtype=np.float64)
    expc_c = np.ascontiguousarray(expc_c, dtype=np.float64)
    base = weight * np.log1p(gain_p).sum(axis=1)
    best_val = -np.inf
    best_jp = best_jc = 0
    for jp in range(gain_p.shape[0]):
        loss = weight * np.log1p(gain_p[jp] * expc_c).sum(axis=1)
        vals = base[jp] - loss
        jc = int(np.argmax(vals))
        if vals[jc] > best_val:
            best_val = float(vals[jc])
            best_jp, best_jc = jp, jc
    return best_jp, best_jc, best_val


@njit(cache=True)
def _pair_scan_max_jit(gain_p, expc_c, weight):
    kp = gain_p.shape[0]
    kc = expc_c.shape[0]
    n = gain_p.shape[1]
    best_val = -np.inf
    best_jp = 0
    best_jc = 0
    for jp in range(kp):
        base = 0.0
        for i in range(n):
            base += math.log1p(gain_p[jp, i])
        for jc in range(kc):
            loss = 0.0
            for i in range(n):
                loss += math.log1p(gain_p[jp, i] * expc_c[jc, i])
            val = weight * (base - loss)
            if val > best_val:
                best_val = val
                best_jp = jp
                best_jc = jc
    return best_jp, best_jc, best_val


def pair_scan_max_jit(gain_p, expc_c, weight):
    gain_p = np.ascontiguousarray(gain_p, dtype=np.float64)
    expc_c = np.ascontiguousarray(expc_c, dtype=np.float64)
    return _pair_scan_max_jit(gain_p, expc_c, float(weight))


if NUMBA_ENABLED:
    branch_candidates = _branch_candidates_jit
    pair_scan_max = pair_scan_max_jit
else:
    branch_candidates = branch_candidates_numpy
    pair_scan_max = pair_scan_max_numpy


def warmup():
    """Trigger JIT compilation on tiny inputs (no-op on the numpy path)."""
    branch_candidates(np.array([1.0, 0.5]), 0.1, 0.1)
    pair_scan_max(np.array([[1.0, 2.0]]), np.array([[0.5, 0.5]]), 1.0)
