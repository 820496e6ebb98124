"""Scalar Gaussian-information-bottleneck quantities.

The compression of a Gaussian channel output down to a rate budget of ``c``
nats per channel use keeps

    I(c) = 1/2 * ln((1 + rho) / (1 + rho * exp(-2c)))

nats of information about the channel input, where ``rho`` is the SNR.  This
module provides that information-rate function, its derivative, the AWGN
capacity it saturates to, and the per-Hz spectral flavour used by the
frequency-domain solvers.

Conventions: all logarithms natural, all rates in nats.  ``c = math.inf`` is
the explicit "uncompressed" marker and returns the capacity exactly.
``rho = 0`` returns 0 for every ``c``.
"""

import numpy as np

__all__ = [
    "info_rate",
    "info_rate_slope",
    "awgn_capacity",
    "spectral_info_density",
]


def _check_nonneg(name, value):
    arr = np.asarray(value, dtype=np.float64)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise ValueError(f"{name} must be >= 0 and not NaN, got {value!r}")
    return arr


def info_rate(rho, c):
    """Relevant information (nats/use) kept at SNR ``rho``, rate budget ``c``.

    Parameters
    ----------
    rho : float or array_like
        Signal-to-noise ratio, >= 0.
    c : float or array_like
        Compression rate in nats per channel use, >= 0.  ``inf`` allowed and
        yields ``awgn_capacity(rho)`` exactly.

    Returns
    -------
    float or ndarray
        ``0.5 * ln((1+rho) / (1+rho*exp(-2c)))``.
    """
    rho = _check_nonneg("rho", rho)
    c = _check_nonneg("c", c)
    rho, c = np.broadcast_arrays(rho, c)
    # exp(-2c) underflows harmlessly to 0 for huge c, which is the exact
    # infinite-rate limit, so no special case beyond the shared formula.
    out = 0.5 * (np.log1p(rho) - np.log1p(rho * np.exp(-2.0 * c)))
    return out if out.ndim else float(out)


def info_rate_slope(rho, c):
    """Derivative of :func:`info_rate` in ``c``: ``1 / (1 + exp(2c)/rho)``.

    Equals ``rho / (1 + rho)`` at ``c = 0`` and 0 when ``rho = 0``.
    """
    rho = _check_nonneg("rho", rho)
    c = _check_nonneg("c", c)
    if np.any(np.isinf(c)):
        raise ValueError("info_rate_slope requires finite c")
    rho, c = np.broadcast_arrays(rho, c)
    with np.errstate(over="ignore"):
        out = rho / (rho + np.exp(2.0 * c))
    return out if out.ndim else float(out)


def awgn_capacity(rho):
    """AWGN channel capacity ``0.5 * ln(1 + rho)`` in nats per use."""
    rho = _check_nonneg("rho", rho)
    out = 0.5 * np.log1p(rho)
    return out if out.ndim else float(out)


def spectral_info_density(s, h2, c):
    """Mutual-information spectral density in nats/s/Hz.

    ``s`` is the transmit power spectral density (Watt/Hz, noise density
    normalized to 1), ``h2`` the squared channel gain and ``c`` the fronthaul
    rate density (nats/s/Hz).  The per-second convention packs the two
    channel uses per Hz-second into the density, hence ``exp(-c)`` rather
    than ``exp(-2c)``:

        density(s, h2, c) == 2 * info_rate(s * h2, c / 2)
    """
    s = _check_nonneg("s", s)
    h2 = _check_nonneg("h2", h2)
    c = _check_nonneg("c", c)
    s, h2, c = np.broadcast_arrays(s, h2, c)
    snr = s * h2
    out = np.log1p(snr) - np.log1p(snr * np.exp(-c))
    return out if out.ndim else float(out)
