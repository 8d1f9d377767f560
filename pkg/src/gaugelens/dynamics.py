"""Parameter Jacobians of the hidden representation and the metrics they induce.

The column order of every Jacobian follows ``MlpModel.theta``:
W1 (row-major), b1, W2 (row-major), b2. The representation does not depend
on the readout, so the W2 and b2 columns are zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError
from .linalg import as_matrix
from .model import MlpModel

__all__ = [
    "RepJacobian",
    "PullbackMetric",
    "rep_jacobian_analytic",
    "rep_jacobian_fd",
    "pullback_metric",
    "rep_change_cov",
    "block_diag_omega",
]


@dataclass(frozen=True, eq=False)
class RepJacobian:
    J: np.ndarray
    x: np.ndarray


@dataclass(frozen=True, eq=False)
class PullbackMetric:
    G: np.ndarray

    def spectrum(self) -> np.ndarray:
        """Eigenvalues, descending. p is usually far beyond Jacobi territory, so LAPACK."""
        return np.linalg.eigvalsh(self.G)[::-1]


def _probe(m: MlpModel, x):
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.shape != (m.d_in,):
        raise ShapeError(f"probe input must have {m.d_in} entries, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DomainError("probe input contains NaN or Inf")
    return x


def rep_jacobian_analytic(m: MlpModel, x) -> RepJacobian:
    """Closed-form dh/dtheta for h = D tanh(W1 x + b1)."""
    x = _probe(m, x)
    d_h, d_in = m.d_h, m.d_in
    slope = 1.0 - np.tanh(m.W1 @ x + m.b1) ** 2
    # column a of M is dh/db1[a]
    M = np.diag(slope) if m.gauge is None else m.gauge.D * slope[None, :]
    J = np.zeros((d_h, m.n_params))
    J[:, : d_h * d_in] = (M[:, :, None] * x[None, None, :]).reshape(d_h, d_h * d_in)
    J[:, d_h * d_in: d_h * d_in + d_h] = M
    return RepJacobian(J, x)


def rep_jacobian_fd(m: MlpModel, x, step=1e-5) -> RepJacobian:
    """Central-difference Jacobian (h(theta + s e_j) - h(theta - s e_j)) / 2s."""
    if not step > 0:
        raise DomainError("finite-difference step must be > 0")
    x = _probe(m, x)
    theta = m.theta
    J = np.empty((m.d_h, theta.size))
    for j in range(theta.size):
        up, down = theta.copy(), theta.copy()
        up[j] += step
        down[j] -= step
        J[:, j] = (m.with_theta(up).hidden(x)[:, 0] - m.with_theta(down).hidden(x)[:, 0]) / (2 * step)
    return RepJacobian(J, x)


def pullback_metric(J) -> PullbackMetric:
    """G = J^T J, the quadratic form ||J dtheta||^2 on parameter space."""
    J = J.J if isinstance(J, RepJacobian) else as_matrix(J, "J")
    G = J.T @ J
    return PullbackMetric(0.5 * (G + G.T))


def rep_change_cov(J, Omega) -> np.ndarray:
    """Covariance J Omega J^T of representation changes under updates with covariance Omega."""
    J = J.J if isinstance(J, RepJacobian) else as_matrix(J, "J")
    Omega = as_matrix(Omega, "Omega")
    p = J.shape[1]
    if Omega.shape != (p, p):
        raise ShapeError(f"Omega must be {p}x{p}, got {Omega.shape}")
    S = J @ Omega @ J.T
    return 0.5 * (S + S.T)


def block_diag_omega(m: MlpModel, w1=1.0, b1=1.0, w2=1.0, b2=1.0) -> np.ndarray:
    """Diagonal update covariance with one variance per parameter block."""
    variances = np.concatenate([
        np.full(m.d_h * m.d_in, w1), np.full(m.d_h, b1),
        np.full(m.C * m.d_h, w2), np.full(m.C, b2),
    ])
    if np.any(variances < 0):
        raise DomainError("variances must be nonnegative")
    return np.diag(variances)
