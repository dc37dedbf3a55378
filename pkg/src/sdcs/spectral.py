"""Spectral facts about the difference matrix D and its powers.

Closed-form singular values, the low-rank commutator identity behind the
Weyl sandwich, and the limiting (Szego-type) distribution, all as executable
checks that back the power-law behavior of sigma_j(D^{-r}).
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .quantize import difference_matrix

__all__ = [
    "SpectralBoundCheck",
    "exact_singular_values_D",
    "exact_singular_values_Dinv",
    "dinv_sandwich",
    "commutator_rank_check",
    "weyl_sandwich_check",
    "szego_distribution_check",
    "fit_power_law_bounds",
    "matrix_power_singular_values",
]


def exact_singular_values_D(m):
    """sigma_j(D) = 2 cos(pi j / (2m+1)), j = 1..m, descending."""
    if m < 1:
        raise ValueError("m must be >= 1")
    j = np.arange(1, m + 1)
    return 2.0 * np.cos(np.pi * j / (2 * m + 1))


def exact_singular_values_Dinv(m):
    """sigma_j(D^{-1}) = 1 / (2 sin(pi (j - 1/2) / (2m+1))), descending."""
    if m < 1:
        raise ValueError("m must be >= 1")
    j = np.arange(1, m + 1)
    return 1.0 / (2.0 * np.sin(np.pi * (j - 0.5) / (2 * m + 1)))


def dinv_sandwich(m):
    """Elementary bounds (m+1/2)/(pi(j-1/2)) <= sigma_j(D^{-1}) <= (m+1/2)/(2(j-1/2))."""
    j = np.arange(1, m + 1)
    lower = (m + 0.5) / (np.pi * (j - 0.5))
    upper = (m + 0.5) / (2.0 * (j - 0.5))
    return lower, upper


def matrix_power_singular_values(r, m):
    """Numerical singular values of D**r (descending)."""
    d = difference_matrix(m)
    return linalg.singular_values(np.linalg.matrix_power(d, r))


def commutator_rank_check(r, m, tol=1e-10):
    """Check that (D^T)^r D^r - (D^T D)^r is supported on two r x r corners.

    Returns ``(numerical_rank, corner_support_violations)``.  The rank is the
    count of singular values above ``tol * sigma_1``; the identity guarantees
    rank <= 2r and exact zeros outside the corner blocks.
    """
    if m < 2 * r:
        raise ValueError("need m >= 2r")
    d = difference_matrix(m)
    dr = np.linalg.matrix_power(d, r)
    c = dr.T @ dr - np.linalg.matrix_power(d.T @ d, r)

    mask = np.zeros((m, m), dtype=bool)
    mask[:r, :r] = True
    mask[m - r:, m - r:] = True
    violations = int(np.count_nonzero(np.abs(c[~mask]) > tol))

    s = linalg.singular_values(c)
    rank = int(np.count_nonzero(s > tol * s[0])) if s[0] > 0 else 0
    return rank, violations


def weyl_sandwich_check(r, m, rtol=1e-9):
    """Count violations of the index-shifted sandwich on sigma_j(D^r).

    sigma_{min(j+2r, m)}(D)^r <= sigma_j(D^r) <= sigma_{max(j-2r, 1)}(D)^r
    for every j; derived from Weyl's eigenvalue perturbation theorem applied
    to the rank-2r commutator, with endpoint clamping via operator-norm
    monotonicity.  Returns the number of violated indices (expected 0).
    """
    if m < 4 * r:
        raise ValueError("need m >= 4r")
    sd = exact_singular_values_D(m)
    sr = matrix_power_singular_values(r, m)
    j = np.arange(1, m + 1)
    lower = sd[np.minimum(j + 2 * r, m) - 1] ** r
    upper = sd[np.maximum(j - 2 * r, 1) - 1] ** r
    slack = rtol * np.maximum(1.0, sr)
    bad = (sr < lower - slack) | (sr > upper + slack)
    return int(np.count_nonzero(bad))


def szego_distribution_check(r, m):
    """Sup distance between sigma(D^r) and the limiting sequence 2^r sin^r(pi j / 2m).

    Both sequences are sorted descending and compared pointwise (quantile
    coupling); the distance decreases as m grows.
    """
    if m < 10:
        raise ValueError("need m >= 10")
    sr = matrix_power_singular_values(r, m)
    j = np.arange(1, m + 1)
    ref = np.sort(2.0**r * np.sin(np.pi * j / (2 * m)) ** r)[::-1]
    return float(np.abs(sr - ref).max())


@dataclass(frozen=True)
class SpectralBoundCheck:
    """Fitted power-law envelope c1 (m/j)^r <= sigma_j(D^{-r}) <= c2 (m/j)^r."""

    r: int
    m: int
    sigma: np.ndarray
    c1: float
    c2: float


def fit_power_law_bounds(r, m):
    """Fit the tightest m-independent power-law envelope for sigma_j(D^{-r}).

    c1 = min_j sigma_j (j/m)^r and c2 = max_j sigma_j (j/m)^r; stability of
    the ratio c2/c1 across m is what the bound asserts.
    """
    if m < 4 * r:
        raise ValueError("need m >= 4r")
    d = difference_matrix(m)
    dinv_r = linalg.apply_inverse_power(d, r, np.eye(m))
    sigma = linalg.singular_values(dinv_r)
    j = np.arange(1, m + 1)
    scaled = sigma * (j / m) ** r
    return SpectralBoundCheck(
        r=r, m=m, sigma=sigma, c1=float(scaled.min()), c2=float(scaled.max())
    )
