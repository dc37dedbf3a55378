"""Dual frame construction and reconstruction.

A full-column-rank m x k matrix ``E`` is an analysis frame; any k x m left
inverse ``F`` of ``E`` is a synthesis (dual) frame.  Besides the canonical
dual (the pseudo-inverse), this module builds the H-dual: the left inverse
minimizing ``||F @ H||_op`` for a noise-shaping matrix ``H``, which for
``H = D**r`` is the r-th order Sobolev dual.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .quantize import NoiseShaper

__all__ = ["DualFrame", "canonical_dual", "h_dual", "reconstruct", "frame_variation"]


@dataclass(frozen=True)
class DualFrame:
    """A left inverse ``F`` (k x m) of the frame ``E`` (m x k)."""

    F: np.ndarray
    E: np.ndarray
    shaper: NoiseShaper | None = None
    order: int = 0

    def __post_init__(self):
        k = self.E.shape[1]
        err = np.abs(self.F @ self.E - np.eye(k)).max()
        if err > 1e-8:
            raise ValueError(f"not a left inverse: max |F E - I| = {err:.3e}")


def canonical_dual(e):
    """Canonical dual frame ``E^dagger = (E^T E)^{-1} E^T``, via SVD."""
    e = linalg.as_matrix(e)
    return DualFrame(F=linalg.pseudo_inverse(e), E=e)


def h_dual(e, shaper, r):
    """The H-dual of ``e``: the left inverse F with ``F H^r = (H^{-r} E)^dagger``.

    H is the shaper's first-order factor; ``r = 0`` gives the canonical dual.
    Realized as ``F = (H^{-r} E)^dagger @ H^{-r}`` without forming any dense
    inverse: the trailing ``H^{-r}`` is applied by transposed back
    substitution.
    """
    e = linalg.as_matrix(e)
    if r == 0:
        return DualFrame(F=linalg.pseudo_inverse(e), E=e, shaper=shaper, order=0)
    g = shaper.factor_matrix()
    e_whitened = linalg.apply_inverse_power(g, r, e)
    p = linalg.pseudo_inverse(e_whitened)  # k x m
    # F = p @ H^{-r}  <=>  F^T = (H^r)^{-T} p^T
    f = linalg.apply_inverse_power_transposed(g, r, p.T).T
    return DualFrame(F=f, E=e, shaper=shaper, order=r)


def reconstruct(dual, q):
    """Apply the synthesis frame: ``x_hat = F q``."""
    q = np.asarray(q, dtype=float)
    if q.shape[0] != dual.F.shape[1]:
        raise ValueError(
            f"coefficient length {q.shape[0]} != frame size {dual.F.shape[1]}"
        )
    return dual.F @ q


def frame_variation(dual):
    """Frame variation ``sum_j ||f_j - f_{j+1}||_2`` with ``f_{m+1} := 0``.

    The ``f_j`` are the columns of F.
    """
    f = dual.F if isinstance(dual, DualFrame) else np.asarray(dual, dtype=float)
    cols = np.hstack([f, np.zeros((f.shape[0], 1))])
    return float(np.linalg.norm(np.diff(cols, axis=1), axis=0).sum())
