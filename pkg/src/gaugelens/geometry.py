"""Metric-dependent and canonical geometry of representation sets.

Everything here works on ``d x n`` representation matrices whose columns are
samples. Cosine similarity is the Euclidean-metric quantity that a gauge
change distorts; whitening supplies the canonical coordinates in which it
stops depending on the gauge.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, DomainError, NotPSDError, ShapeError, SymmetryError
from .linalg import GaugeTransform, Spectrum, as_matrix, cond, inv_sqrt_psd, sym_eig

__all__ = [
    "RepresentationSet",
    "MetricTensor",
    "FeatureBasis",
    "GeometryReport",
    "HIST_BINS",
    "cosine_matrix",
    "metric_cosine",
    "covariance",
    "whiten",
    "canonical_cosine",
    "delta_cos_stats",
    "cos_histogram",
    "spectrum_report",
    "feature_gram",
    "interference",
    "feature_readout",
]

ZERO_NORM = 1e-12
HIST_BINS = 40


@dataclass(frozen=True, eq=False)
class RepresentationSet:
    """Representation matrix ``H`` (d x n, one column per sample) and optional labels."""

    H: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        H = as_matrix(self.H, "H")
        object.__setattr__(self, "H", H)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (H.shape[1],):
                raise ShapeError(f"expected {H.shape[1]} labels, got {labels.shape}")
            object.__setattr__(self, "labels", labels)

    @property
    def d(self) -> int:
        return self.H.shape[0]

    @property
    def n(self) -> int:
        return self.H.shape[1]

    def transform(self, g: GaugeTransform) -> "RepresentationSet":
        if g.d != self.d:
            raise ShapeError(f"gauge dimension {g.d} != representation dimension {self.d}")
        return RepresentationSet(g.D @ self.H, self.labels)


def _H(R):
    return R.H if isinstance(R, RepresentationSet) else as_matrix(R, "H")


@dataclass(frozen=True, eq=False)
class MetricTensor:
    """Symmetric PSD inner-product matrix on representation coordinates."""

    G: np.ndarray

    def __post_init__(self):
        G = as_matrix(self.G, "G")
        if G.shape[0] != G.shape[1]:
            raise ShapeError(f"metric must be square, got {G.shape}")
        scale = max(1.0, float(np.max(np.abs(G))))
        if np.max(np.abs(G - G.T)) > 1e-9 * scale:
            raise SymmetryError("metric tensor is not symmetric")
        lam = sym_eig(0.5 * (G + G.T)).eigenvalues
        if lam[-1] < -1e-8 * max(abs(lam[0]), abs(lam[-1])):
            raise NotPSDError(f"metric tensor has negative eigenvalue {lam[-1]:.3e}")
        object.__setattr__(self, "G", G)

    @classmethod
    def from_gauge(cls, g: GaugeTransform) -> "MetricTensor":
        """The metric D^T D that the gauge induces on the original coordinates."""
        G = g.D.T @ g.D
        return cls(0.5 * (G + G.T))

    def inner(self, u, v) -> float:
        return float(np.asarray(u) @ self.G @ np.asarray(v))


@dataclass(frozen=True, eq=False)
class FeatureBasis:
    """Feature directions as columns of ``F`` (d x k), with optional activations (k x n)."""

    F: np.ndarray
    activations: np.ndarray | None = None

    def __post_init__(self):
        F = as_matrix(self.F, "F")
        norms = np.linalg.norm(F, axis=0)
        if np.any(norms < ZERO_NORM):
            raise DegenerateError(f"feature column {int(np.argmin(norms))} is zero")
        object.__setattr__(self, "F", F)
        if self.activations is not None:
            a = as_matrix(self.activations, "activations")
            if a.shape[0] != F.shape[1]:
                raise ShapeError(f"activations need {F.shape[1]} rows, got {a.shape[0]}")
            object.__setattr__(self, "activations", a)

    @property
    def k(self) -> int:
        return self.F.shape[1]

    def transform(self, g: GaugeTransform) -> "FeatureBasis":
        """Feature directions follow the representation: F -> D F; activations are unchanged."""
        return FeatureBasis(g.D @ self.F, self.activations)

    def synthesize(self) -> np.ndarray:
        """Representations ``F @ a`` built from the stored activations."""
        if self.activations is None:
            raise DomainError("feature basis has no activations")
        return self.F @ self.activations


@dataclass(frozen=True, eq=False)
class GeometryReport:
    mean_abs_dcos: float
    max_abs_dcos: float
    cos_histogram_before: np.ndarray
    cos_histogram_after: np.ndarray


def cosine_matrix(R) -> np.ndarray:
    """Pairwise cosine similarities between the columns of ``H`` (n x n)."""
    H = _H(R)
    norms = np.linalg.norm(H, axis=0)
    bad = np.flatnonzero(norms < ZERO_NORM)
    if bad.size:
        raise DegenerateError(f"column {int(bad[0])} has (near) zero norm; cosine undefined")
    U = H / norms
    C = U.T @ U
    C = 0.5 * (C + C.T)
    np.fill_diagonal(C, 1.0)
    return C


def metric_cosine(u, v, G) -> float:
    """Cosine of ``u`` and ``v`` under the inner product ``<u, v> = u^T G v``."""
    G = G.G if isinstance(G, MetricTensor) else np.asarray(G, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if G.shape != (u.size, u.size) or v.shape != u.shape:
        raise ShapeError(f"shapes u{u.shape} v{v.shape} G{G.shape} do not conform")
    uu, vv = u @ G @ u, v @ G @ v
    if not (uu > 0 and vv > 0):
        raise DegenerateError("vector has non-positive squared length under the metric")
    return float((u @ G @ v) / (np.sqrt(uu) * np.sqrt(vv)))


def covariance(R, centered=True) -> np.ndarray:
    """Second-moment matrix (1/n) sum h h^T, about the mean unless ``centered=False``."""
    H = _H(R)
    n = H.shape[1]
    if n < 2:
        raise DomainError(f"covariance needs at least 2 samples, got {n}")
    if centered:
        H = H - H.mean(axis=1, keepdims=True)
    S = (H @ H.T) / n
    return 0.5 * (S + S.T)


def whiten(R, eps=None, centered=True):
    """Map ``R`` to coordinates with identity covariance.

    Returns ``(whitened, gauge)`` where ``gauge.D = covariance(R)^(-1/2)``
    and the whitened set is ``D @ H`` (labels carried over).
    """
    R = R if isinstance(R, RepresentationSet) else RepresentationSet(R)
    D = inv_sqrt_psd(covariance(R, centered=centered), eps=eps)
    kappa = cond(D)
    g = GaugeTransform(D, np.linalg.solve(D, np.eye(R.d)), kappa, "whitening")
    return R.transform(g), g


def canonical_cosine(R, eps=None) -> np.ndarray:
    """Cosine similarities computed in whitened coordinates."""
    return cosine_matrix(whiten(R, eps=eps)[0])


def cos_histogram(C) -> np.ndarray:
    """Counts of strict-upper-triangle cosines in 40 uniform bins over [-1, 1]."""
    C = np.asarray(C)
    vals = np.clip(C[np.triu_indices(C.shape[0], k=1)], -1.0, 1.0)
    counts, _ = np.histogram(vals, bins=HIST_BINS, range=(-1.0, 1.0))
    return counts


def delta_cos_stats(C1, C2) -> GeometryReport:
    """Statistics of |C1 - C2| over sample pairs i < j."""
    C1, C2 = np.asarray(C1, dtype=np.float64), np.asarray(C2, dtype=np.float64)
    if C1.ndim != 2 or C1.shape != C2.shape or C1.shape[0] != C1.shape[1]:
        raise ShapeError(f"need equal square matrices, got {C1.shape} and {C2.shape}")
    if C1.shape[0] < 2:
        raise DomainError("need at least 2 samples for pairwise statistics")
    iu = np.triu_indices(C1.shape[0], k=1)
    diff = np.abs(C1[iu] - C2[iu])
    return GeometryReport(
        mean_abs_dcos=float(diff.mean()),
        max_abs_dcos=float(diff.max()),
        cos_histogram_before=cos_histogram(C1),
        cos_histogram_after=cos_histogram(C2),
    )


def spectrum_report(R, centered=True) -> Spectrum:
    """Descending eigen-spectrum of the representation covariance."""
    return sym_eig(covariance(R, centered=centered))


def feature_gram(F, G=None) -> np.ndarray:
    """Gram matrix F^T F of feature directions, or F^T G F under a metric."""
    F = F.F if isinstance(F, FeatureBasis) else FeatureBasis(F).F
    if G is None:
        return F.T @ F
    G = G.G if isinstance(G, MetricTensor) else as_matrix(G, "G")
    if G.shape != (F.shape[0], F.shape[0]):
        raise ShapeError(f"metric {G.shape} does not match feature dimension {F.shape[0]}")
    return F.T @ G @ F


def interference(F) -> float:
    """Mean |cosine| between distinct feature directions (0 iff mutually orthogonal)."""
    F = F.F if isinstance(F, FeatureBasis) else FeatureBasis(F).F
    k = F.shape[1]
    if k < 2:
        return 0.0
    U = F / np.linalg.norm(F, axis=0)
    Gn = U.T @ U
    return float(np.abs(Gn[~np.eye(k, dtype=bool)]).mean())


def feature_readout(F, R) -> np.ndarray:
    """Independent per-feature readout ``F^T h``.

    Recovers the activations exactly when the features are orthonormal;
    otherwise off-diagonal Gram entries leak between features.
    """
    F = F.F if isinstance(F, FeatureBasis) else FeatureBasis(F).F
    H = _H(R) if not (isinstance(R, np.ndarray) and R.ndim == 1) else R[:, None]
    if H.shape[0] != F.shape[0]:
        raise ShapeError(f"representation dimension {H.shape[0]} != feature dimension {F.shape[0]}")
    return F.T @ H
