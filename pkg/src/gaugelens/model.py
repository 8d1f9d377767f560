"""Two-layer tanh perceptron with an explicit post-activation gauge.

Data are stored column-wise: an input matrix ``X`` is ``d_in x n`` and the
hidden representation matrix ``H`` is ``d_h x n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, ShapeError, TrainingDivergedError
from .geometry import RepresentationSet
from .linalg import GaugeTransform, as_matrix, make_rng

__all__ = [
    "Dataset",
    "MlpModel",
    "InvarianceReport",
    "make_blobs",
    "train_test_split",
    "train_mlp",
    "init_mlp",
    "hidden_reps",
    "apply_gauge",
    "verify_invariance",
    "accuracy",
]

BATCH_SIZE = 32


@dataclass(frozen=True, eq=False)
class Dataset:
    X: np.ndarray
    y: np.ndarray
    C: int

    def __post_init__(self):
        X = as_matrix(self.X, "X")
        y = np.asarray(self.y)
        if y.ndim != 1 or y.size != X.shape[1]:
            raise ShapeError(f"need one label per column of X ({X.shape[1]}), got {y.shape}")
        if X.shape[1] < 2:
            raise DomainError("a dataset needs at least 2 samples")
        if not np.issubdtype(y.dtype, np.integer):
            if not np.all(y == np.round(y)):
                raise DomainError("labels must be integers")
        y = y.astype(np.int64)
        if self.C < 1 or y.min() < 0 or y.max() >= self.C:
            raise DomainError(f"labels must lie in 0..{self.C - 1}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[1]

    @property
    def d_in(self) -> int:
        return self.X.shape[0]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.X[:, idx], self.y[idx], self.C)


@dataclass(frozen=True, eq=False)
class MlpModel:
    """logits(x) = W2 @ D @ tanh(W1 @ x + b1) + b2, with D = I when ungauged."""

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    gauge: GaugeTransform | None = None
    activation: str = "tanh"
    loss_history: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.activation != "tanh":
            raise DomainError(f"unsupported activation {self.activation!r}")
        d_h, d_in = self.W1.shape
        C = self.W2.shape[0]
        if self.b1.shape != (d_h,) or self.W2.shape != (C, d_h) or self.b2.shape != (C,):
            raise ShapeError(
                f"inconsistent parameter shapes W1{self.W1.shape} b1{self.b1.shape} "
                f"W2{self.W2.shape} b2{self.b2.shape}"
            )
        if self.gauge is not None and self.gauge.d != d_h:
            raise ShapeError(f"gauge dimension {self.gauge.d} != hidden width {d_h}")

    @property
    def d_in(self) -> int:
        return self.W1.shape[1]

    @property
    def d_h(self) -> int:
        return self.W1.shape[0]

    @property
    def C(self) -> int:
        return self.W2.shape[0]

    @property
    def n_params(self) -> int:
        return self.d_h * self.d_in + self.d_h + self.C * self.d_h + self.C

    @property
    def theta(self) -> np.ndarray:
        """Flattened parameters in the fixed order (W1, b1, W2, b2)."""
        return np.concatenate([self.W1.ravel(), self.b1, self.W2.ravel(), self.b2])

    def with_theta(self, theta) -> "MlpModel":
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (self.n_params,):
            raise ShapeError(f"expected {self.n_params} parameters, got {theta.shape}")
        d_h, d_in, C = self.d_h, self.d_in, self.C
        cuts = np.cumsum([d_h * d_in, d_h, C * d_h])
        W1, b1, W2, b2 = np.split(theta, cuts)
        return replace(
            self, W1=W1.reshape(d_h, d_in), b1=b1.copy(), W2=W2.reshape(C, d_h),
            b2=b2.copy(), loss_history=(),
        )

    def _check_inputs(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2 or X.shape[0] != self.d_in:
            raise ShapeError(f"inputs must have {self.d_in} rows, got shape {X.shape}")
        return X

    def hidden(self, X) -> np.ndarray:
        """Post-activation (and post-gauge) hidden matrix, ``d_h x n``."""
        X = self._check_inputs(X)
        A = np.tanh(self.W1 @ X + self.b1[:, None])
        return A if self.gauge is None else self.gauge.D @ A

    def logits(self, X) -> np.ndarray:
        return self.W2 @ self.hidden(X) + self.b2[:, None]

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.logits(X), axis=0)


@dataclass(frozen=True)
class InvarianceReport:
    max_logit_diff: float
    prediction_agreement: float


def make_blobs(d_in, C, n, spread=5.0, seed=0) -> Dataset:
    """Gaussian clusters around random unit-norm centers scaled by ``spread``.

    Class sizes differ by at most one; sample order is shuffled.
    """
    if C < 2 or n < C or d_in < 1:
        raise DomainError(f"need C >= 2, n >= C and d_in >= 1 (got d_in={d_in}, C={C}, n={n})")
    if spread < 0:
        raise DomainError("spread must be nonnegative")
    rng = make_rng(seed)
    centers = rng.standard_normal((d_in, C))
    centers /= np.linalg.norm(centers, axis=0)
    centers *= spread
    y = rng.permutation(np.arange(n) % C)
    X = centers[:, y] + rng.standard_normal((d_in, n))
    return Dataset(X, y, C)


def train_test_split(data: Dataset, test_fraction=0.2, seed=0):
    """Deterministic shuffled split; returns ``(train, test)``."""
    n_test = int(round(test_fraction * data.n))
    if not 1 <= n_test < data.n - 1:
        raise DomainError(f"test fraction {test_fraction} leaves no usable split of {data.n}")
    perm = make_rng(seed).permutation(data.n)
    return data.subset(np.sort(perm[n_test:])), data.subset(np.sort(perm[:n_test]))


def init_mlp(d_in, d_h, C, seed=0) -> MlpModel:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization per block."""
    if d_h < 1 or d_in < 1 or C < 1:
        raise DomainError(f"layer sizes must be positive (d_in={d_in}, d_h={d_h}, C={C})")
    rng = make_rng(seed)
    a1, a2 = 1.0 / np.sqrt(d_in), 1.0 / np.sqrt(d_h)
    return MlpModel(
        W1=rng.uniform(-a1, a1, (d_h, d_in)),
        b1=rng.uniform(-a1, a1, d_h),
        W2=rng.uniform(-a2, a2, (C, d_h)),
        b2=rng.uniform(-a2, a2, C),
    )


def _cross_entropy(Z, y):
    Z = Z - Z.max(axis=0)
    logp = Z - np.log(np.exp(Z).sum(axis=0))
    return -logp[y, np.arange(y.size)].mean(), logp


def train_mlp(data: Dataset, d_h=32, epochs=50, lr=0.1, seed=0, batch_size=BATCH_SIZE) -> MlpModel:
    """Fit a tanh MLP by plain mini-batch SGD on softmax cross-entropy.

    The returned model's ``loss_history`` holds the full-data loss before
    training followed by the mean mini-batch loss of each epoch.
    """
    if epochs < 1:
        raise DomainError("epochs must be >= 1")
    if not lr > 0:
        raise DomainError("lr must be > 0")
    rng = make_rng(seed)
    m = init_mlp(data.d_in, d_h, data.C, seed=rng)
    W1, b1, W2, b2 = (np.array(a) for a in (m.W1, m.b1, m.W2, m.b2))
    X, y = data.X, data.y

    history = [_cross_entropy(m.logits(X), y)[0]]
    for epoch in range(1, epochs + 1):
        perm = rng.permutation(data.n)
        total = 0.0
        # overflow is caught by the finiteness check below
        with np.errstate(over="ignore", invalid="ignore"):
            for start in range(0, data.n, batch_size):
                idx = perm[start:start + batch_size]
                xb, yb = X[:, idx], y[idx]
                A = np.tanh(W1 @ xb + b1[:, None])
                loss, logp = _cross_entropy(W2 @ A + b2[:, None], yb)
                dZ = np.exp(logp)
                dZ[yb, np.arange(yb.size)] -= 1.0
                dZ /= yb.size
                dA = (W2.T @ dZ) * (1.0 - A * A)
                W2 -= lr * (dZ @ A.T)
                b2 -= lr * dZ.sum(axis=1)
                W1 -= lr * (dA @ xb.T)
                b1 -= lr * dA.sum(axis=1)
                total += loss * yb.size
        epoch_loss = total / data.n
        if not np.isfinite(epoch_loss) or not np.all(np.isfinite(W1)) or not np.all(np.isfinite(W2)):
            raise TrainingDivergedError(epoch)
        history.append(epoch_loss)
    return MlpModel(W1, b1, W2, b2, loss_history=tuple(float(h) for h in history))


def accuracy(m: MlpModel, data: Dataset) -> float:
    return float(np.mean(m.predict(data.X) == data.y))


def hidden_reps(m: MlpModel, X, labels=None) -> RepresentationSet:
    """Hidden representations of the columns of ``X`` (gauge applied if present)."""
    return RepresentationSet(m.hidden(X), labels)


def apply_gauge(m: MlpModel, g: GaugeTransform) -> MlpModel:
    """Change hidden coordinates h -> D h and compensate the readout W2 -> W2 D^-1.

    The transform acts after the tanh, so it is stored on the model rather
    than folded into W1. Gauges compose: applying g1 then g2 stores g2 ∘ g1.
    """
    if g.d != m.d_h:
        raise ShapeError(f"gauge dimension {g.d} does not match hidden width {m.d_h}")
    gauge = g if m.gauge is None else m.gauge.then(g)
    return replace(m, W2=m.W2 @ g.Dinv, gauge=gauge, loss_history=())


def verify_invariance(m: MlpModel, m2: MlpModel, X) -> InvarianceReport:
    """Compare two models' logits and argmax predictions on the columns of ``X``."""
    if m.d_in != m2.d_in or m.C != m2.C:
        raise ShapeError("models disagree on input dimension or class count")
    Z1, Z2 = m.logits(X), m2.logits(X)
    return InvarianceReport(
        max_logit_diff=float(np.max(np.abs(Z1 - Z2))),
        prediction_agreement=float(np.mean(np.argmax(Z1, axis=0) == np.argmax(Z2, axis=0))),
    )
