"""Dense linear algebra helpers: SVD, least squares, banded triangular solves.

All matrices are plain ``numpy.ndarray`` objects (real valued, 2-d).  The
routines here wrap LAPACK via numpy/scipy but enforce the contracts the rest
of the package relies on: finite inputs, descending singular values, explicit
rank-deficiency failures, and triangular solves that never form an inverse.
"""

import numpy as np
from scipy.linalg import solve_triangular

__all__ = [
    "as_matrix",
    "svd",
    "singular_values",
    "pseudo_inverse_apply",
    "pseudo_inverse",
    "apply_inverse_power",
    "operator_norm_2",
    "operator_norm_inf",
    "RankDeficientError",
]

# sigma_min / sigma_max below this ratio counts as rank deficient
RANK_TOL = 1e-10


class RankDeficientError(ValueError):
    """Matrix does not have full column rank at working precision."""

    def __init__(self, sigma_min, sigma_max):
        self.sigma_min = float(sigma_min)
        self.sigma_max = float(sigma_max)
        ratio = self.sigma_min / self.sigma_max if self.sigma_max > 0 else 0.0
        super().__init__(
            f"rank deficient: sigma_min/sigma_max = {ratio:.3e} "
            f"(sigma_min={self.sigma_min:.3e}, sigma_max={self.sigma_max:.3e})"
        )


def as_matrix(a):
    """Coerce to a finite, 2-d float array (C order)."""
    a = np.ascontiguousarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d array, got ndim={a.ndim}")
    if not np.isfinite(a).all():
        raise ValueError("matrix contains non-finite entries")
    return a


def svd(a):
    """Full-rank-agnostic SVD, ``a = u @ diag(s) @ vt``.

    Returns ``(s, u, vt)`` with ``s`` descending.  Raises ``LinAlgError``
    with iteration diagnostics if LAPACK fails to converge.
    """
    a = as_matrix(a)
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    return s, u, vt


def singular_values(a):
    """Descending singular values of ``a``."""
    a = as_matrix(a)
    return np.linalg.svd(a, compute_uv=False)


def pseudo_inverse(a):
    """Moore-Penrose pseudo-inverse of a full-column-rank matrix, via SVD."""
    a = as_matrix(a)
    s, u, vt = svd(a)
    if s[0] == 0 or s[-1] <= RANK_TOL * s[0]:
        raise RankDeficientError(s[-1], s[0])
    return (vt.T / s) @ u.T


def pseudo_inverse_apply(a, b):
    """Least-squares solution ``argmin_x ||a x - b||_2`` via SVD.

    ``a`` must have full column rank (sigma_min > 1e-10 * sigma_max).
    """
    a = as_matrix(a)
    b = np.asarray(b, dtype=float)
    s, u, vt = svd(a)
    if s[0] == 0 or s[-1] <= RANK_TOL * s[0]:
        raise RankDeficientError(s[-1] if s.size else 0.0, s[0] if s.size else 0.0)
    return vt.T @ ((u.T @ b).T / s).T


def apply_inverse_power(h, r, b):
    """Solve ``h^r x = b`` by ``r`` successive forward substitutions.

    ``h`` is lower triangular with nonzero diagonal (in this package: the
    first-order factor of a noise shaper, a unit lower-bidiagonal matrix).
    The inverse is never formed; cost is O(r * m * cols) for bidiagonal ``h``.
    """
    if r < 0:
        raise ValueError("power must be nonnegative")
    b = np.asarray(b, dtype=float)
    if r == 0:
        return b.copy()
    h = as_matrix(h)
    if np.any(np.diag(h) == 0):
        raise ZeroDivisionError("zero diagonal entry in triangular factor")
    x = b
    for _ in range(r):
        x = solve_triangular(h, x, lower=True)
    return x


def apply_inverse_power_transposed(h, r, b):
    """Solve ``(h^r)^T x = b``; back substitution counterpart of the above."""
    if r < 0:
        raise ValueError("power must be nonnegative")
    b = np.asarray(b, dtype=float)
    if r == 0:
        return b.copy()
    h = as_matrix(h)
    if np.any(np.diag(h) == 0):
        raise ZeroDivisionError("zero diagonal entry in triangular factor")
    x = b
    for _ in range(r):
        x = solve_triangular(h, x, lower=True, trans="T")
    return x


def operator_norm_2(a):
    """Spectral norm: largest singular value."""
    a = as_matrix(a)
    if not a.size:
        return 0.0
    return float(singular_values(a)[0])


def operator_norm_inf(a):
    """l_inf -> l_inf operator norm: maximum absolute row sum."""
    a = as_matrix(a)
    if not a.size:
        return 0.0
    return float(np.abs(a).sum(axis=1).max())
