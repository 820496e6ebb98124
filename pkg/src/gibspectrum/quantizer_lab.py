"""One-bit relay front-ends compared on the scalar AWGN channel.

Three mutual-information curves versus SNR: the stochastic (bottleneck)
quantizer with a bit budget, the deterministic sign quantizer with Gaussian
input, and the sign quantizer with antipodal binary input (a BSC).  The sign
quantizer uses Gauss-Hermite quadrature for the Gaussian expectation; Monte
Carlo stays in the tests as an oracle.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, xlogy

from .gib_core import info_rate

__all__ = [
    "QuantizerCurve",
    "sign_quantizer_mi_gaussian",
    "stochastic_quantizer_mi",
    "bpsk_sign_mi",
    "make_quantizer_curves",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class QuantizerCurve:
    snr: np.ndarray
    mi: np.ndarray
    scheme: str


def sign_quantizer_mi_gaussian(snr, order=128):
    """I(x; sign(y)) for x ~ N(0,1), y = sqrt(snr)*x + n, n ~ N(0,1).

    With P(z=1|x) = Phi(sqrt(snr)*x) and P(z=1) = 1/2 the mutual information
    is E_x[ sum_z P(z|x) ln(2 P(z|x)) ], integrated with ``order``-point
    Gauss-Hermite quadrature.
    """
    if snr < 0:
        raise ValueError(f"snr must be >= 0, got {snr}")
    if order < 8:
        raise ValueError(f"quadrature order must be >= 8, got {order}")
    nodes, weights = np.polynomial.hermite.hermgauss(order)
    x = math.sqrt(2.0) * nodes
    a = math.sqrt(snr)
    p1 = ndtr(a * x)
    p0 = ndtr(-a * x)
    integrand = (
        xlogy(p1, p1) + xlogy(p0, p0) + (p1 + p0) * _LN2
    )
    return float(np.sum(weights * integrand) / math.sqrt(math.pi))


def stochastic_quantizer_mi(snr, bits_per_use):
    """Bottleneck quantizer at a bit budget: info_rate at ``bits * ln 2``."""
    if bits_per_use < 0:
        raise ValueError(f"bits_per_use must be >= 0, got {bits_per_use}")
    return info_rate(snr, bits_per_use * _LN2)


def bpsk_sign_mi(snr):
    """Antipodal input through the sign quantizer: a BSC with p = Phi(-sqrt(snr))."""
    if snr < 0:
        raise ValueError(f"snr must be >= 0, got {snr}")
    p = float(ndtr(-math.sqrt(snr)))
    return float(_LN2 + xlogy(p, p) + xlogy(1.0 - p, 1.0 - p))


def make_quantizer_curves(snr_samples, order=128):
    """The three comparison curves over common SNR samples."""
    snr = np.asarray(snr_samples, dtype=np.float64)
    return [
        QuantizerCurve(
            snr,
            np.array([stochastic_quantizer_mi(r, 1.0) for r in snr]),
            "stochastic-gib",
        ),
        QuantizerCurve(
            snr,
            np.array([sign_quantizer_mi_gaussian(r, order) for r in snr]),
            "sign-gaussian",
        ),
        QuantizerCurve(
            snr, np.array([bpsk_sign_mi(r) for r in snr]), "sign-bpsk"
        ),
    ]
