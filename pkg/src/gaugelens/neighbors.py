"""Exact cosine nearest neighbors and their stability under a gauge change."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError

__all__ = ["NeighborLists", "knn_cosine", "jaccard_at_k", "top1_flip_rate"]


@dataclass(frozen=True, eq=False)
class NeighborLists:
    """``lists[i]`` holds the k neighbors of sample i, most similar first."""

    k: int
    lists: np.ndarray

    @property
    def n(self) -> int:
        return self.lists.shape[0]


def knn_cosine(C, k=10) -> NeighborLists:
    """The k most cosine-similar other samples for every row of ``C``.

    The query itself is excluded and ties go to the lower sample index.
    """
    C = np.asarray(C, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ShapeError(f"need a square cosine matrix, got {C.shape}")
    n = C.shape[0]
    if not 1 <= k < n:
        raise DomainError(f"need 1 <= k < n, got k={k}, n={n}")
    scores = -C
    np.fill_diagonal(scores, np.inf)
    order = np.argsort(scores, axis=1, kind="stable")
    return NeighborLists(int(k), order[:, :k].copy())


def _check_pair(A: NeighborLists, B: NeighborLists):
    if A.lists.shape != B.lists.shape or A.k != B.k:
        raise ShapeError(f"neighbor lists disagree in shape: {A.lists.shape} vs {B.lists.shape}")


def jaccard_at_k(A: NeighborLists, B: NeighborLists) -> float:
    """Mean over queries of |A_i ∩ B_i| / |A_i ∪ B_i|."""
    _check_pair(A, B)
    k = A.k
    shared = np.array([np.intersect1d(a, b, assume_unique=True).size for a, b in zip(A.lists, B.lists)])
    return float(np.mean(shared / (2 * k - shared)))


def top1_flip_rate(A: NeighborLists, B: NeighborLists) -> float:
    """Fraction of queries whose nearest neighbor changed."""
    _check_pair(A, B)
    return float(np.mean(A.lists[:, 0] != B.lists[:, 0]))
