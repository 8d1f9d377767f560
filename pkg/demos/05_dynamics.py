# %% [markdown]
# # Parameter Jacobians and the pullback metric
#
# A small parameter update dtheta moves the hidden vector by about J dtheta.
# The pullback metric G = J^T J measures how far, and a gauge D changes it
# to J^T D^T D J: which updates look "large" depends on the frame.

# %%
import numpy as np

from gaugelens import (apply_gauge, make_blobs, make_gauge, pullback_metric, rep_change_cov,
                       rep_jacobian_analytic, rep_jacobian_fd, train_mlp, train_test_split)
from gaugelens.dynamics import block_diag_omega

train, test = train_test_split(make_blobs(16, 4, 1000, spread=5.0, seed=1), seed=0)
model = train_mlp(train, d_h=64, epochs=50, lr=0.1, seed=0)
x = test.X[:, 0]

J = rep_jacobian_analytic(model, x).J
J_fd = rep_jacobian_fd(model, x, step=1e-5).J
print(f"J is {J.shape[0]}x{J.shape[1]}, analytic vs central differences: "
      f"{np.abs(J - J_fd).max() / np.abs(J).max():.1e} relative")

# %%
rng = np.random.default_rng(0)
dtheta = rng.standard_normal(model.n_params)
dtheta *= 1e-4 / np.linalg.norm(dtheta)
dh = model.with_theta(model.theta + dtheta).hidden(x)[:, 0] - model.hidden(x)[:, 0]
print(f"|dh| = {np.linalg.norm(dh):.3e}, |J dtheta| = {np.linalg.norm(J @ dtheta):.3e}")

# %% [markdown]
# Under a gauge the Jacobian picks up D on the left. The metric's spectrum
# stretches by up to kappa^2 while its rank stays at d_h.

# %%
g = make_gauge(64, kappa=20.0, seed=0)
Jg = rep_jacobian_analytic(apply_gauge(model, g), x).J
print(f"|Jg - D J| = {np.abs(Jg - g.D @ J).max():.1e}")
for name, jac in (("original", J), ("gauged", Jg)):
    lam = pullback_metric(jac).spectrum()
    print(f"{name:>9}: top eigenvalue {lam[0]:.3e}, rank {np.sum(lam > 1e-10 * lam[0])}")

# %% [markdown]
# With isotropic updates on the first layer only, the representation change
# has covariance J Omega J^T.

# %%
Omega = block_diag_omega(model, w1=1.0, b1=1.0, w2=0.0, b2=0.0)
cov = rep_change_cov(J, Omega)
print("leading eigenvalues of J Omega J^T:", np.round(np.linalg.eigvalsh(cov)[::-1][:5], 3))
