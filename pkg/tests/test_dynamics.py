import numpy as np
import pytest

from gaugelens.dynamics import (block_diag_omega, pullback_metric, rep_change_cov,
                                rep_jacobian_analytic, rep_jacobian_fd)
from gaugelens.errors import DomainError, ShapeError
from gaugelens.linalg import make_gauge
from gaugelens.model import MlpModel, apply_gauge, init_mlp


def rel_err(A, B):
    return np.abs(A - B).max() / np.abs(A).max()


class TestAnalyticJacobian:
    def test_zero_model_bias_block(self):
        m = MlpModel(np.zeros((4, 3)), np.zeros(4), np.ones((2, 4)), np.zeros(2))
        J = rep_jacobian_analytic(m, [0.3, -1.0, 2.0]).J
        np.testing.assert_array_equal(J[:, 12:16], np.eye(4))
        g = make_gauge(4, 6.0, seed=0)
        Jg = rep_jacobian_analytic(apply_gauge(m, g), [0.3, -1.0, 2.0]).J
        np.testing.assert_array_equal(Jg[:, 12:16], g.D)

    def test_readout_columns_zero(self, small_model, rng):
        J = rep_jacobian_analytic(small_model, rng.standard_normal(3)).J
        assert J.shape == (4, small_model.n_params)
        assert not np.any(J[:, 16:])

    def test_matches_fd(self, small_model, rng):
        for _ in range(5):
            x = rng.standard_normal(3)
            assert rel_err(rep_jacobian_analytic(small_model, x).J, rep_jacobian_fd(small_model, x).J) <= 1e-5

    def test_matches_fd_gauged(self, small_model, rng):
        m = apply_gauge(small_model, make_gauge(4, 20.0, seed=3))
        x = rng.standard_normal(3)
        assert rel_err(rep_jacobian_analytic(m, x).J, rep_jacobian_fd(m, x).J) <= 1e-5

    def test_shape(self, small_model):
        with pytest.raises(ShapeError):
            rep_jacobian_analytic(small_model, np.ones(4))


class TestFiniteDifferences:
    def test_linear_region(self, rng):
        m = init_mlp(3, 4, 2, seed=1)
        tiny = m.with_theta(m.theta * 1e-4)
        x = rng.standard_normal(3)
        Ja, Jf = rep_jacobian_analytic(tiny, x).J, rep_jacobian_fd(tiny, x).J
        assert np.abs(Ja - Jf).max() <= 1e-8

    def test_truncation_order(self, small_model, rng):
        x = 2 * rng.standard_normal(3)
        Ja = rep_jacobian_analytic(small_model, x).J
        coarse = np.abs(rep_jacobian_fd(small_model, x, step=1e-1).J - Ja).max()
        fine = np.abs(rep_jacobian_fd(small_model, x, step=1e-5).J - Ja).max()
        assert coarse >= 10 * fine

    def test_bad_step(self, small_model):
        with pytest.raises(DomainError):
            rep_jacobian_fd(small_model, np.zeros(3), step=0.0)

    def test_trained_model(self, trained, blobs_split):
        x = blobs_split[1].X[:, 0]
        assert rel_err(rep_jacobian_analytic(trained, x).J, rep_jacobian_fd(trained, x).J) <= 1e-5


class TestPullback:
    def test_trivial(self):
        np.testing.assert_array_equal(pullback_metric(np.zeros((2, 3))).G, 0)
        np.testing.assert_array_equal(pullback_metric(np.eye(3)).G, np.eye(3))

    def test_quadratic_form(self, rng):
        J = rng.standard_normal((3, 5))
        G = pullback_metric(J).G
        for _ in range(100):
            t = rng.standard_normal(5)
            assert t @ G @ t == pytest.approx(np.sum((J @ t) ** 2), abs=1e-12 * max(1, t @ G @ t))

    def test_psd_and_rank(self, small_model, rng):
        G = pullback_metric(rep_jacobian_analytic(small_model, rng.standard_normal(3)))
        lam = G.spectrum()
        assert lam[-1] >= -1e-10 * np.abs(G.G).max()
        assert np.sum(lam > 1e-10 * lam[0]) <= 4

    def test_gauge_laws(self, small_model, rng):
        g = make_gauge(4, 30.0, seed=2)
        gauged = apply_gauge(small_model, g)
        for _ in range(5):
            x = rng.standard_normal(3)
            J = rep_jacobian_analytic(small_model, x).J
            Jg = rep_jacobian_analytic(gauged, x).J
            assert np.abs(Jg - g.D @ J).max() <= 1e-9
            Gg = pullback_metric(Jg).G
            assert np.abs(Gg - J.T @ g.D.T @ g.D @ J).max() <= 1e-9 * max(1.0, np.abs(Gg).max())

    def test_first_order_prediction(self, small_model, rng):
        # stated bound: remainder <= 1e-6 * |dtheta| at |dtheta| = 1e-4
        x = rng.standard_normal(3)
        J = rep_jacobian_analytic(small_model, x).J
        h0 = small_model.hidden(x)[:, 0]
        for _ in range(10):
            dt = rng.standard_normal(small_model.n_params)
            dt *= 1e-4 / np.linalg.norm(dt)
            h1 = small_model.with_theta(small_model.theta + dt).hidden(x)[:, 0]
            assert np.linalg.norm(h1 - h0 - J @ dt) <= 1e-6 * 1e-4

    def test_first_order_remainder_is_quadratic(self, small_model, rng):
        x = rng.standard_normal(3)
        J = rep_jacobian_analytic(small_model, x).J
        h0 = small_model.hidden(x)[:, 0]
        direction = rng.standard_normal(small_model.n_params)
        direction /= np.linalg.norm(direction)
        rem = []
        for eps in (1e-2, 1e-3, 1e-4):
            h1 = small_model.with_theta(small_model.theta + eps * direction).hidden(x)[:, 0]
            rem.append(np.linalg.norm(h1 - h0 - eps * J @ direction))
        np.testing.assert_allclose([rem[0] / rem[1], rem[1] / rem[2]], 100.0, rtol=0.05)


class TestRepChangeCov:
    def test_identity_omega(self, rng):
        J = rng.standard_normal((3, 6))
        np.testing.assert_allclose(rep_change_cov(J, np.eye(6)), J @ J.T, atol=1e-14)
        np.testing.assert_allclose(rep_change_cov(J, 4.0 * np.eye(6)), 4 * J @ J.T, atol=1e-13)

    def test_shape(self, rng):
        with pytest.raises(ShapeError):
            rep_change_cov(rng.standard_normal((3, 6)), np.eye(5))

    def test_monte_carlo(self, rng):
        J = rng.standard_normal((3, 6))
        A = rng.standard_normal((6, 6))
        Omega = A @ A.T / 6
        draws = rng.multivariate_normal(np.zeros(6), Omega, size=100_000)
        emp = np.cov((J @ draws.T), bias=True)
        exact = rep_change_cov(J, Omega)
        assert np.linalg.norm(emp - exact) / np.linalg.norm(exact) <= 0.05

    def test_block_omega(self, small_model):
        om = block_diag_omega(small_model, w1=2.0, b1=3.0, w2=0.0, b2=1.0)
        diag = np.diag(om)
        assert diag.size == small_model.n_params
        assert set(diag[:12]) == {2.0} and set(diag[12:16]) == {3.0} and set(diag[16:24]) == {0.0}
        with pytest.raises(DomainError):
            block_diag_omega(small_model, w1=-1.0)
