"""Seeded random matrices and sparse signals, plus Monte Carlo studies.

Randomness comes from the Philox 4x64 counter-based generator, keyed by
(base seed, stream index), so trials are bit-reproducible regardless of
execution order and can be split across workers without coordination.
Gaussian variates are produced by Box-Muller on the generator's uniforms.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .decode import SparseSignal
from .quantize import difference_matrix

__all__ = [
    "EnsembleSpec",
    "SignalSpec",
    "stream_rng",
    "gaussian",
    "sample_matrix",
    "sample_signal",
    "sigma_min_study",
    "inf_norm_study",
]

MATRIX_KINDS = ("gaussian_unit", "gaussian_scaled", "bernoulli")
SIGNAL_MODELS = ("constant", "gaussian")


def stream_rng(seed, stream=0):
    """A Philox generator keyed by (seed, stream)."""
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
                    np.uint64(stream & 0xFFFFFFFFFFFFFFFF)])
    return np.random.Generator(np.random.Philox(key=key))


def gaussian(rng, size):
    """Standard normal draws via Box-Muller on ``rng``'s uniforms."""
    n = int(np.prod(size))
    pairs = (n + 1) // 2
    # 1 - U is in (0, 1], keeping the log finite
    u1 = 1.0 - rng.random(pairs)
    u2 = rng.random(pairs)
    rad = np.sqrt(-2.0 * np.log(u1))
    ang = 2.0 * np.pi * u2
    z = np.concatenate([rad * np.cos(ang), rad * np.sin(ang)])[:n]
    return z.reshape(size)


@dataclass(frozen=True)
class EnsembleSpec:
    """Matrix ensemble: i.i.d. N(0,1), N(0,1/m), or +-1 Bernoulli entries."""

    kind: str
    m: int
    n: int
    seed: int

    def __post_init__(self):
        if self.kind not in MATRIX_KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.m < 1 or self.n < 1:
            raise ValueError("dimensions must be positive")


def sample_matrix(spec, stream=0):
    """Draw the matrix described by ``spec`` (deterministic per seed/stream)."""
    rng = stream_rng(spec.seed, stream)
    shape = (spec.m, spec.n)
    if spec.kind == "bernoulli":
        return np.where(rng.random(shape) < 0.5, -1.0, 1.0)
    a = gaussian(rng, shape)
    if spec.kind == "gaussian_scaled":
        a /= np.sqrt(spec.m)
    return a


@dataclass(frozen=True)
class SignalSpec:
    """k-sparse signal model: uniform random support, constant or Gaussian values.

    ``constant`` puts +1/sqrt(k) on every support position so ||x||_2 = 1.
    """

    n: int
    k: int
    model: str
    seed: int

    def __post_init__(self):
        if self.model not in SIGNAL_MODELS:
            raise ValueError(f"unknown signal model {self.model!r}")
        if not 1 <= self.k <= self.n:
            raise ValueError("need 1 <= k <= n")


def sample_signal(spec, stream=0):
    """Draw the sparse signal described by ``spec``."""
    rng = stream_rng(spec.seed, stream)
    support = np.sort(rng.permutation(spec.n)[: spec.k])
    if spec.model == "constant":
        values = np.full(spec.k, 1.0 / np.sqrt(spec.k))
    else:
        values = gaussian(rng, spec.k)
        # zero has probability zero; regenerate defensively all the same
        while np.any(values == 0):
            values[values == 0] = gaussian(rng, int(np.sum(values == 0)))
    return SparseSignal(n=spec.n, support=support, values=values)


def sigma_min_study(r, k, lambdas, trials, seed, kind="gaussian_scaled"):
    """Monte Carlo of sigma_min(D^{-r} E) over an oversampling grid.

    For each lambda in ``lambdas`` (m = lambda * k must be integral) draws
    ``trials`` matrices E from ``kind`` and records min / max / mean of
    sigma_min(D^{-r} E) plus the worst case of its reciprocal (the statistic
    plotted against lambda on log-log axes).
    """
    rows = []
    for li, lam in enumerate(lambdas):
        m = lam * k
        if m != int(m):
            raise ValueError(f"lambda={lam} gives non-integral m for k={k}")
        m = int(m)
        d = difference_matrix(m)
        vals = np.empty(trials)
        for t in range(trials):
            spec = EnsembleSpec(kind=kind, m=m, n=k, seed=seed)
            e = sample_matrix(spec, stream=li * 1_000_003 + t)
            de = linalg.apply_inverse_power(d, r, e)
            vals[t] = linalg.singular_values(de)[-1]
        rows.append({
            "lambda": float(lam), "m": m, "k": k, "r": r,
            "min": float(vals.min()), "max": float(vals.max()),
            "mean": float(vals.mean()),
            "worst_inverse": float(1.0 / vals.min()),
        })
    return rows


def inf_norm_study(k, lambdas, trials, seed, kind="gaussian_unit"):
    """Empirical max of ||E||_{inf->inf} / sqrt(m k) per oversampling ratio."""
    rows = []
    for li, lam in enumerate(lambdas):
        m = lam * k
        if m != int(m):
            raise ValueError(f"lambda={lam} gives non-integral m for k={k}")
        m = int(m)
        worst = 0.0
        for t in range(trials):
            spec = EnsembleSpec(kind=kind, m=m, n=k, seed=seed)
            e = sample_matrix(spec, stream=li * 1_000_003 + t)
            worst = max(worst, linalg.operator_norm_inf(e) / np.sqrt(m * k))
        rows.append({
            "lambda": float(lam), "m": m, "k": k,
            "max_ratio": float(worst),
        })
    return rows
