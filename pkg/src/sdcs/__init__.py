"""Sigma-delta quantization of compressed sensing measurements.

Quantizes linear measurements of sparse signals with noise-shaping
(sigma-delta) quantizers and recovers the signal in two stages: an l1
coarse decode that identifies the support, then a Sobolev/H-dual frame
reconstruction on the identified columns.  Includes the spectral analysis
of the difference operator that underpins the error behavior, seeded random
ensembles, and a reproducible experiment harness.
"""

from . import decode, ensembles, frames, harness, linalg, quantize, spectral
from .decode import (
    RecoveryResult,
    SparseSignal,
    estimate_support,
    l1_decode,
    two_stage_recover,
)
from .ensembles import (
    EnsembleSpec,
    SignalSpec,
    sample_matrix,
    sample_signal,
    sigma_min_study,
)
from .frames import DualFrame, canonical_dual, frame_variation, h_dual, reconstruct
from .quantize import (
    Alphabet,
    NoiseShaper,
    QuantizationResult,
    difference_matrix,
    pcm_quantize,
    rate_distortion_plan,
    shape_quantize,
    sigma_delta_quantize,
)

__version__ = "0.1.0"
