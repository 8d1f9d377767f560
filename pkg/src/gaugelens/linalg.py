"""Dense spectral primitives and seeded gauge-matrix constructors.

Matrices are plain float64 ``numpy`` arrays. The symmetric eigensolver and the
SVD are cyclic Jacobi methods; rotations on disjoint index pairs commute, so
each sweep is run as ``d - 1`` rounds of round-robin pairings and every round
is applied as one vectorized update.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, DomainError, NotPSDError, ShapeError, SymmetryError

__all__ = [
    "Spectrum",
    "GaugeTransform",
    "GAUGE_KINDS",
    "as_matrix",
    "make_rng",
    "sym_eig",
    "svd",
    "cond",
    "inv_sqrt_psd",
    "random_orthogonal",
    "make_gauge",
]

MAX_SWEEPS = 100
GAUGE_KINDS = ("identity", "orthogonal", "diagonal", "general", "whitening")
_EPS = np.finfo(np.float64).eps


def as_matrix(a, name="matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D float64 array or raise."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} contains NaN or Inf")
    return a


def make_rng(seed) -> np.random.Generator:
    """Seeded PCG64 generator; an existing Generator is passed through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order with eigenvectors as matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __iter__(self):
        yield self.eigenvalues
        yield self.eigenvectors


@lru_cache(maxsize=64)
def _round_robin(d):
    """Pairings covering every (p, q), p < q, exactly once in d-1 (or d) rounds."""
    m = d + (d % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        p, q = [], []
        for a, b in zip(players[: m // 2], reversed(players[m // 2:])):
            if a < d and b < d:
                p.append(min(a, b))
                q.append(max(a, b))
        rounds.append((np.array(p, dtype=np.intp), np.array(q, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _rotation(theta):
    # smaller root of t^2 + 2 theta t - 1 = 0, overflow-safe via hypot
    sign = np.where(theta >= 0, 1.0, -1.0)
    t = sign / (np.abs(theta) + np.hypot(theta, 1.0))
    c = 1.0 / np.sqrt(1.0 + t * t)
    return c, t * c


def _fix_signs(vectors):
    """Flip each column so its largest-magnitude entry is positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def sym_eig(A, tol=1e-12) -> Spectrum:
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi.

    Parameters
    ----------
    A : (d, d) array
        Symmetric within ``1e-9`` (relative to its largest entry).
    tol : float
        Sweeps stop once the off-diagonal Frobenius mass is at most
        ``tol * ||A||_F``.

    Returns
    -------
    Spectrum
        Eigenvalues sorted descending; orthonormal eigenvectors with a
        deterministic sign (largest entry of each column positive).
    """
    A = as_matrix(A, "A")
    d = A.shape[0]
    if A.shape[1] != d:
        raise ShapeError(f"sym_eig needs a square matrix, got {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A))))
    asym = float(np.max(np.abs(A - A.T)))
    if asym > 1e-9 * scale:
        raise SymmetryError(f"matrix is not symmetric (max |A - A^T| = {asym:.3e})")

    A = 0.5 * (A + A.T)
    V = np.eye(d)
    norm = np.linalg.norm(A)
    rounds = _round_robin(d)
    off = 0.0
    for _ in range(MAX_SWEEPS + 1):
        off = np.sqrt(max(norm**2 - float(np.sum(np.diag(A) ** 2)), 0.0))
        # recompute directly when cancellation makes the shortcut unreliable
        if off <= 1e-6 * norm:
            off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * norm:
            break
        for p, q in rounds:
            apq = A[p, q]
            active = np.abs(apq) > 1e-300
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            c, s = _rotation((A[q, q] - A[p, p]) / (2.0 * apq))
            Ap, Aq = A[:, p].copy(), A[:, q].copy()
            A[:, p] = c * Ap - s * Aq
            A[:, q] = s * Ap + c * Aq
            Ap, Aq = A[p, :].copy(), A[q, :].copy()
            A[p, :] = c[:, None] * Ap - s[:, None] * Aq
            A[q, :] = s[:, None] * Ap + c[:, None] * Aq
            A[p, q] = 0.0
            A[q, p] = 0.0
            Vp, Vq = V[:, p].copy(), V[:, q].copy()
            V[:, p] = c * Vp - s * Vq
            V[:, q] = s * Vp + c * Vq
    else:
        raise ConvergenceError(
            f"Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps "
            f"(relative off-diagonal residual {off / norm:.3e})",
            residual=off / norm,
        )

    lam = np.diag(A).copy()
    order = np.argsort(-lam, kind="stable")
    return Spectrum(lam[order], _fix_signs(V[:, order]))


def _complete_basis(U, keep):
    """Replace columns of U not flagged in ``keep`` by an orthonormal completion."""
    m, r = U.shape
    basis = [U[:, j] for j in range(r) if keep[j]]
    out = U.copy()
    candidates = iter(np.eye(m))
    for j in range(r):
        if keep[j]:
            continue
        for e in candidates:
            v = e.copy()
            for _ in range(2):
                for b in basis:
                    v -= (b @ v) * b
            nv = np.linalg.norm(v)
            if nv > 0.5:
                v /= nv
                basis.append(v)
                out[:, j] = v
                break
    return out


def svd(A):
    """Thin SVD by one-sided (Hestenes) Jacobi.

    Returns ``(U, s, V)`` with ``A = U @ diag(s) @ V.T``, ``s`` descending and
    nonnegative, and ``U`` (m x r), ``V`` (n x r) with orthonormal columns,
    ``r = min(m, n)``.
    """
    A = as_matrix(A, "A")
    transposed = A.shape[0] < A.shape[1]
    W = A.T.copy() if transposed else A.copy()
    m, n = W.shape
    V = np.eye(n)
    thresh = max(n, 4) * _EPS
    rounds = _round_robin(n)
    worst = 0.0
    for _ in range(MAX_SWEEPS):
        rotated = False
        worst = 0.0
        for p, q in rounds:
            if p.size == 0:
                continue
            Wp, Wq = W[:, p], W[:, q]
            alpha = np.einsum("ij,ij->j", Wp, Wp)
            beta = np.einsum("ij,ij->j", Wq, Wq)
            gamma = np.einsum("ij,ij->j", Wp, Wq)
            scale = np.sqrt(alpha * beta)
            active = np.abs(gamma) > thresh * scale
            if not np.any(active):
                continue
            rotated = True
            worst = max(worst, float(np.max(np.abs(gamma[active]) / scale[active])))
            p, q = p[active], q[active]
            c, s = _rotation((beta[active] - alpha[active]) / (2.0 * gamma[active]))
            Wp, Wq = W[:, p].copy(), W[:, q].copy()
            W[:, p] = c * Wp - s * Wq
            W[:, q] = s * Wp + c * Wq
            Vp, Vq = V[:, p].copy(), V[:, q].copy()
            V[:, p] = c * Vp - s * Vq
            V[:, q] = s * Vp + c * Vq
        if not rotated:
            break
    else:
        raise ConvergenceError(
            f"one-sided Jacobi SVD did not converge in {MAX_SWEEPS} sweeps "
            f"(max column cosine {worst:.3e})",
            residual=worst,
        )

    s = np.linalg.norm(W, axis=0)
    order = np.argsort(-s, kind="stable")
    s, W, V = s[order], W[:, order], V[:, order]
    keep = s > max(m, n) * _EPS * (s[0] if s.size else 0.0)
    U = np.zeros_like(W)
    U[:, keep] = W[:, keep] / s[keep]
    if not np.all(keep):
        U = _complete_basis(U, keep)
    if transposed:
        return V, s, U
    return U, s, V


def cond(A) -> float:
    """Spectral condition number sigma_max / sigma_min (inf if singular)."""
    A = as_matrix(A, "A")
    if A.shape[0] != A.shape[1]:
        raise ShapeError(f"cond needs a square matrix, got {A.shape}")
    s = svd(A)[1]
    if s[-1] < 1e-300:
        return float("inf")
    return float(s[0] / s[-1])


def inv_sqrt_psd(S, eps=None) -> np.ndarray:
    """Symmetric inverse square root ``V diag((lam + eps)^-1/2) V^T``.

    ``eps`` defaults to ``1e-12 * trace(S) / d``, which shifts every
    eigenvalue of the result by a relative ``1e-12 * cond(S)`` at most. Eigenvalues below
    ``-1e-8 * ||S||`` raise :class:`NotPSDError`; smaller negative values are
    treated as zero.
    """
    lam, V = sym_eig(S)
    d = lam.size
    norm = float(np.max(np.abs(lam)))
    if lam[-1] < -1e-8 * norm:
        raise NotPSDError(f"matrix is not PSD (min eigenvalue {lam[-1]:.3e}, norm {norm:.3e})")
    if eps is None:
        eps = 1e-12 * float(np.trace(S)) / d
    lam = np.clip(lam, 0.0, None) + eps
    if lam[-1] <= 0.0:
        raise NotPSDError("matrix is singular and eps = 0; inverse square root undefined")
    R = (V / np.sqrt(lam)) @ V.T
    return 0.5 * (R + R.T)


def random_orthogonal(d, seed) -> np.ndarray:
    """Haar-random orthogonal matrix from the QR factorization of a Gaussian.

    The signs of R's diagonal are folded into Q so the factorization (and
    thus the sample) is unique for a given seed.
    """
    if int(d) != d or d < 1:
        raise DomainError(f"dimension must be a positive integer, got {d!r}")
    Z = make_rng(seed).standard_normal((int(d), int(d)))
    Q, R = np.linalg.qr(Z)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


@dataclass(frozen=True, eq=False)
class GaugeTransform:
    """An invertible change of coordinates h -> D h with its cached inverse."""

    D: np.ndarray
    Dinv: np.ndarray
    kappa: float
    kind: str

    def __post_init__(self):
        if self.kind not in GAUGE_KINDS:
            raise DomainError(f"unknown gauge kind {self.kind!r}")
        for a in (self.D, self.Dinv):
            a.setflags(write=False)

    @property
    def d(self) -> int:
        return self.D.shape[0]

    @classmethod
    def from_matrix(cls, D, kind="general"):
        D = np.array(as_matrix(D, "D"))
        if D.shape[0] != D.shape[1]:
            raise ShapeError(f"gauge matrix must be square, got {D.shape}")
        kappa = cond(D)
        if not np.isfinite(kappa):
            raise DomainError("gauge matrix is singular")
        return cls(D, np.linalg.solve(D, np.eye(D.shape[0])), kappa, kind)

    @classmethod
    def identity(cls, d):
        return cls(np.eye(d), np.eye(d), 1.0, "identity")

    def apply(self, H):
        """Transform representation columns: ``D @ H``."""
        return self.D @ H

    def then(self, other: "GaugeTransform") -> "GaugeTransform":
        """The composite ``other ∘ self`` (apply self first)."""
        D = other.D @ self.D
        return GaugeTransform(D, self.Dinv @ other.Dinv, cond(D), "general")

    def inverse(self) -> "GaugeTransform":
        return GaugeTransform(np.array(self.Dinv), np.array(self.D), self.kappa, self.kind)


def make_gauge(d, kappa=1.0, kind="general", seed=0) -> GaugeTransform:
    """Build a seeded gauge transform with condition number ``kappa``.

    ``D = U diag(s) V^T`` with ``U, V`` independent random orthogonal
    matrices and ``s`` log-uniformly spaced from 1 to ``kappa``.
    ``kind="orthogonal"`` forces ``s = 1``; ``kind="diagonal"`` uses
    ``U = V = I`` with the spacing randomly assigned to axes;
    ``kind="identity"`` returns ``I``.
    """
    if int(d) != d or d < 1:
        raise DomainError(f"dimension must be a positive integer, got {d!r}")
    d = int(d)
    kappa = float(kappa)
    if not np.isfinite(kappa) or kappa < 1.0:
        raise DomainError(f"kappa must be >= 1, got {kappa}")
    if kind == "identity":
        return GaugeTransform.identity(d)
    if kind == "orthogonal":
        Q = random_orthogonal(d, seed)
        return GaugeTransform(Q, Q.T.copy(), 1.0, "orthogonal")
    if kind not in ("diagonal", "general"):
        raise DomainError(f"make_gauge cannot build kind {kind!r}")
    if d == 1 and kappa != 1.0:
        raise DomainError("a 1-dimensional gauge always has condition number 1")

    rng = make_rng(seed)
    s = np.geomspace(1.0, kappa, d) if d > 1 else np.ones(1)
    if kind == "diagonal":
        s = s[rng.permutation(d)]
        return GaugeTransform(np.diag(s), np.diag(1.0 / s), kappa, "diagonal")
    U = random_orthogonal(d, rng)
    V = random_orthogonal(d, rng)
    D = (U * s) @ V.T
    Dinv = (V / s) @ U.T
    return GaugeTransform(D, Dinv, kappa, "general")
