import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaugelens.errors import DomainError, ShapeError, TrainingDivergedError
from gaugelens.linalg import GaugeTransform, make_gauge
from gaugelens.model import (Dataset, MlpModel, accuracy, apply_gauge, hidden_reps, init_mlp,
                             make_blobs, train_mlp, train_test_split, verify_invariance)


class TestDataset:
    def test_label_range(self):
        with pytest.raises(DomainError):
            Dataset(np.zeros((2, 3)), [0, 1, 2], 2)

    def test_needs_two_samples(self):
        with pytest.raises(DomainError):
            Dataset(np.zeros((2, 1)), [0], 2)

    def test_label_count(self):
        with pytest.raises(ShapeError):
            Dataset(np.zeros((2, 3)), [0, 1], 2)


class TestBlobs:
    def test_small(self):
        data = make_blobs(2, 2, 4, spread=10.0, seed=0)
        assert data.X.shape == (2, 4)
        assert np.bincount(data.y).tolist() == [2, 2]
        c0 = data.X[:, data.y == 0].mean(axis=1)
        c1 = data.X[:, data.y == 1].mean(axis=1)
        assert np.linalg.norm(c0 - c1) > 3.0

    def test_uneven_counts(self):
        counts = np.bincount(make_blobs(3, 3, 10, seed=0).y)
        assert counts.max() - counts.min() <= 1

    def test_deterministic(self):
        a, b = make_blobs(4, 3, 30, seed=5), make_blobs(4, 3, 30, seed=5)
        np.testing.assert_array_equal(a.X, b.X)
        np.testing.assert_array_equal(a.y, b.y)

    @pytest.mark.parametrize("args", [(2, 1, 10), (2, 3, 2), (0, 2, 4)])
    def test_invalid(self, args):
        with pytest.raises(DomainError):
            make_blobs(*args)

    def test_zero_spread_is_chance(self):
        train, test = train_test_split(make_blobs(16, 4, 400, spread=0.0, seed=1), seed=0)
        m = train_mlp(train, d_h=32, epochs=20, lr=0.1, seed=0)
        assert accuracy(m, test) < 0.45


class TestSplit:
    def test_sizes_and_disjoint(self):
        data = make_blobs(3, 2, 50, seed=0)
        train, test = train_test_split(data, seed=3)
        assert (train.n, test.n) == (40, 10)
        allx = np.hstack([train.X, test.X])
        assert np.unique(allx, axis=1).shape[1] == 50


class TestTraining:
    def test_zero_hidden(self, blobs_split):
        with pytest.raises(DomainError):
            train_mlp(blobs_split[0], d_h=0)

    def test_bad_hyperparameters(self, blobs_split):
        with pytest.raises(DomainError):
            train_mlp(blobs_split[0], epochs=0)
        with pytest.raises(DomainError):
            train_mlp(blobs_split[0], lr=0.0)

    def test_accuracy(self, blobs_split):
        train, test = blobs_split
        m = train_mlp(train, d_h=32, epochs=50, lr=0.1, seed=0)
        assert accuracy(m, test) >= 0.9
        assert np.isfinite(m.loss_history[-1])
        assert m.loss_history[-1] <= m.loss_history[0]

    def test_deterministic(self, blobs_split):
        a = train_mlp(blobs_split[0], d_h=8, epochs=3, seed=4)
        b = train_mlp(blobs_split[0], d_h=8, epochs=3, seed=4)
        np.testing.assert_array_equal(a.theta, b.theta)

    def test_divergence(self, blobs_split):
        # log-sum-exp keeps the loss finite until the readout itself overflows
        with np.errstate(all="ignore"), pytest.raises(TrainingDivergedError) as err:
            train_mlp(blobs_split[0], d_h=8, epochs=5, lr=1e308, seed=0)
        assert err.value.epoch == 1


class TestParameters:
    def test_theta_layout(self):
        m = init_mlp(3, 4, 2, seed=0)
        assert m.n_params == 4 * 3 + 4 + 2 * 4 + 2 == m.theta.size
        np.testing.assert_array_equal(m.theta[:12], m.W1.ravel())
        np.testing.assert_array_equal(m.theta[12:16], m.b1)
        np.testing.assert_array_equal(m.with_theta(m.theta).theta, m.theta)

    def test_init_bounds(self):
        m = init_mlp(16, 64, 4, seed=0)
        assert np.abs(m.W1).max() <= 1 / 4 and np.abs(m.W2).max() <= 1 / 8

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            MlpModel(np.zeros((3, 2)), np.zeros(2), np.zeros((2, 3)), np.zeros(2))


class TestHiddenReps:
    def test_zero_weights(self):
        m = MlpModel(np.zeros((3, 2)), np.zeros(3), np.ones((2, 3)), np.zeros(2))
        np.testing.assert_array_equal(hidden_reps(m, np.ones((2, 5))).H, 0)

    def test_scalar(self):
        m = MlpModel(np.array([[1.0]]), np.zeros(1), np.ones((2, 1)), np.zeros(2))
        assert hidden_reps(m, np.zeros((1, 1))).H[0, 0] == 0.0

    def test_matches_per_sample_loop(self, small_model, rng):
        X = rng.standard_normal((3, 17))
        H = hidden_reps(small_model, X).H
        for i in range(X.shape[1]):
            h = [np.tanh(sum(small_model.W1[a, b] * X[b, i] for b in range(3)) + small_model.b1[a])
                 for a in range(4)]
            np.testing.assert_allclose(H[:, i], h, atol=1e-12)

    def test_shape_error(self, small_model):
        with pytest.raises(ShapeError):
            hidden_reps(small_model, np.zeros((4, 2)))


class TestGauge:
    def test_identity_is_exact(self, trained, blobs_split):
        X = blobs_split[1].X
        g = apply_gauge(trained, GaugeTransform.identity(64))
        np.testing.assert_array_equal(g.logits(X), trained.logits(X))
        assert verify_invariance(trained, g, X) == verify_invariance(trained, trained, X)
        rep = verify_invariance(trained, trained, X)
        assert (rep.max_logit_diff, rep.prediction_agreement) == (0.0, 1.0)

    def test_diagonal_kappa_ten(self, trained, blobs_split):
        X = blobs_split[1].X
        rep = verify_invariance(trained, apply_gauge(trained, make_gauge(64, 10, "diagonal", 3)), X)
        assert rep.prediction_agreement == 1.0 and rep.max_logit_diff <= 1e-4

    def test_general_kappa_twenty(self, trained, blobs_split):
        X = blobs_split[1].X
        rep = verify_invariance(trained, apply_gauge(trained, make_gauge(64, 20, "general", 3)), X)
        assert rep.prediction_agreement == 1.0 and rep.max_logit_diff <= 1e-4

    def test_dimension_mismatch(self, trained):
        with pytest.raises(ShapeError):
            apply_gauge(trained, make_gauge(3, 2.0))

    def test_hidden_transforms(self, trained, blobs_split):
        X = blobs_split[1].X
        g = make_gauge(64, 30, seed=9)
        H = hidden_reps(trained, X).H
        assert np.abs(hidden_reps(apply_gauge(trained, g), X).H - g.D @ H).max() <= 1e-10

    def test_composition(self, trained, blobs_split):
        X = blobs_split[1].X
        g1, g2 = make_gauge(64, 5, seed=1), make_gauge(64, 8, seed=2)
        twice = apply_gauge(apply_gauge(trained, g1), g2)
        once = apply_gauge(trained, g1.then(g2))
        assert np.abs(twice.logits(X) - once.logits(X)).max() <= 1e-8

    @settings(max_examples=15, deadline=None)
    @given(kappa=st.floats(1.0, 100.0), seed=st.integers(0, 10**6),
           kind=st.sampled_from(["general", "diagonal", "orthogonal"]))
    def test_invariance_property(self, trained, blobs_split, kappa, seed, kind):
        X = blobs_split[1].X
        rep = verify_invariance(trained, apply_gauge(trained, make_gauge(64, kappa, kind, seed)), X)
        assert rep.prediction_agreement == 1.0
        assert rep.max_logit_diff <= 1e-4


def test_agreement_tie_break():
    # two classes with identical logits everywhere: argmax picks class 0 for both models
    m = MlpModel(np.zeros((1, 1)), np.zeros(1), np.zeros((2, 1)), np.zeros(2))
    assert verify_invariance(m, m, np.ones((1, 3))).prediction_agreement == 1.0
    assert (m.predict(np.ones((1, 3))) == 0).all()
