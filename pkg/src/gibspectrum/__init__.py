"""Joint power / fronthaul-rate spectrum allocation for oblivious relaying.

A transmitter talks to its receiver through a rate-limited relay that
compresses the received waveform without knowing the codebook.  Over a
frequency-selective Gaussian channel the jointly optimal transmit spectrum
and per-frequency compression rate follow from the scalar Gaussian
information bottleneck; this package computes them, together with the
classical comparison allocators, a finite-block eigenmode solver, and
brute-force oracles for validation.
"""

from .baselines import (
    WaterPouringResult,
    flat_band_sweep,
    limited_rate_wp,
    uniform_allocation,
    water_pouring,
)
from .branch_analysis import (
    BranchSolution,
    MultiplierPair,
    RegionLabel,
    classify_region,
    concave_allocation,
    density_hessian,
    dividing_curve,
    multipliers_from_point,
    stationary_branches,
)
from .channel import Allocation, ChannelGrid
from .errors import (
    DegenerateMultiplierError,
    GibSpectrumError,
    IndeterminateRegionError,
    InfeasibleChannelError,
    NonConvergenceError,
)
from .gib_core import (
    awgn_capacity,
    info_rate,
    info_rate_slope,
    spectral_info_density,
)
from .mm_allocator import (
    EigenChannel,
    MMState,
    dc_objective,
    mm_solve,
    mm_solve_multistart,
    mm_step,
)
from .oracle import OracleResult, grid_oracle_continuous, grid_oracle_discrete
from .quantizer_lab import (
    QuantizerCurve,
    bpsk_sign_mi,
    sign_quantizer_mi_gaussian,
    stochastic_quantizer_mi,
)
from .spectral_allocator import SolveReport, allocate_at_multipliers, evaluate, solve

__version__ = "0.1.0"
