"""Representation-comparison indices with known gauge-invariance classes.

Linear CKA is invariant to orthogonal maps and isotropic scaling of either
argument. SVCCA at full energy is invariant to any invertible linear map,
since canonical correlations only see the row spaces of the centered data.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, DomainError, ShapeError
from .geometry import RepresentationSet
from .linalg import as_matrix, inv_sqrt_psd, svd

__all__ = ["SimilarityScore", "linear_cka", "svcca_mean_corr", "canonical_correlations"]

DEFAULT_ENERGY = 0.99
DEFAULT_RIDGE = 1e-10


@dataclass(frozen=True)
class SimilarityScore:
    value: float
    method: str
    retained_dims: tuple[int, int] | None = None

    def __float__(self):
        return self.value


def _pair(R1, R2):
    H1 = R1.H if isinstance(R1, RepresentationSet) else as_matrix(R1, "H1")
    H2 = R2.H if isinstance(R2, RepresentationSet) else as_matrix(R2, "H2")
    if H1.shape[1] != H2.shape[1]:
        raise ShapeError(f"sample counts differ: {H1.shape[1]} vs {H2.shape[1]}")
    return H1 - H1.mean(axis=1, keepdims=True), H2 - H2.mean(axis=1, keepdims=True)


def linear_cka(R1, R2) -> SimilarityScore:
    """||H2 H1^T||_F^2 / (||H1 H1^T||_F ||H2 H2^T||_F) on row-centered matrices."""
    H1, H2 = _pair(R1, R2)
    n11 = np.linalg.norm(H1 @ H1.T)
    n22 = np.linalg.norm(H2 @ H2.T)
    if n11 == 0.0 or n22 == 0.0:
        raise DegenerateError("a representation is constant across samples")
    value = np.linalg.norm(H2 @ H1.T) ** 2 / (n11 * n22)
    return SimilarityScore(float(value), "linear_cka")


def _energy_rank(s, energy):
    mass = np.cumsum(s**2)
    if mass[-1] == 0.0:
        return 0
    # tolerance keeps energy=1 from chasing roundoff in the last singular values
    return int(np.searchsorted(mass / mass[-1], energy - 1e-12) + 1)


def canonical_correlations(X1, X2, ridge=DEFAULT_RIDGE) -> np.ndarray:
    """Canonical correlations of two centered data matrices (rows are variables).

    Computed as singular values of S11^-1/2 S12 S22^-1/2, each covariance
    regularized by ``ridge * trace``.
    """
    n = X1.shape[1]
    S11, S22, S12 = X1 @ X1.T / n, X2 @ X2.T / n, X1 @ X2.T / n
    eps1 = ridge * np.trace(S11)
    eps2 = ridge * np.trace(S22)
    T = inv_sqrt_psd(S11, eps=eps1) @ S12 @ inv_sqrt_psd(S22, eps=eps2)
    return np.clip(svd(T)[1][: min(X1.shape[0], X2.shape[0])], 0.0, 1.0)


def svcca_mean_corr(R1, R2, energy=DEFAULT_ENERGY, ridge=DEFAULT_RIDGE) -> SimilarityScore:
    """SVD-truncate each centered representation to ``energy`` of its spectrum,
    then return the mean canonical correlation between the truncated sets.

    The retained directions are rescaled to unit variance before CCA. Canonical
    correlations cannot see that rescaling, but it keeps the CCA ridge from
    biasing ill-conditioned representations.
    """
    if not 0.0 < energy <= 1.0:
        raise DomainError(f"energy must lie in (0, 1], got {energy}")
    H1, H2 = _pair(R1, R2)
    reduced, ranks = [], []
    for H in (H1, H2):
        _, s, V = svd(H)
        r = _energy_rank(s, energy)
        if r == 0:
            raise DegenerateError("representation has rank 0 after truncation")
        reduced.append(np.sqrt(H.shape[1]) * V[:, :r].T)
        ranks.append(r)
    rho = canonical_correlations(*reduced, ridge=ridge)
    return SimilarityScore(float(rho.mean()), "svcca", tuple(ranks))
