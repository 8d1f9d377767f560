# %% [markdown]
# # Which similarity indices see the gauge?
#
# Linear CKA is invariant to rotations and isotropic scaling only, so a
# general gauge lowers it. SVCCA at full energy is invariant to any
# invertible linear map. Truncating to 99% of the variance breaks that
# guarantee because the retained subspace depends on the frame.

# %%
import numpy as np

from gaugelens import (hidden_reps, linear_cka, make_blobs, make_gauge, random_orthogonal,
                       svcca_mean_corr, train_mlp, train_test_split)

train, test = train_test_split(make_blobs(16, 4, 1000, spread=5.0, seed=1), seed=0)
model = train_mlp(train, d_h=64, epochs=50, lr=0.1, seed=0)
R = hidden_reps(model, test.X)

Q = random_orthogonal(64, seed=0)
print(f"CKA(QH, H) = {linear_cka(Q @ R.H, R.H).value:.12f}")
print(f"CKA(3H, H) = {linear_cka(3.0 * R.H, R.H).value:.12f}")

# %%
print(f"{'kappa':>6} {'CKA':>8} {'SVCCA 0.99':>11} {'dims':>7} {'SVCCA 1.0':>12}")
for kappa in (1, 5, 20, 100):
    Rg = R.transform(make_gauge(64, kappa, seed=1))
    trunc = svcca_mean_corr(R, Rg, energy=0.99)
    full = svcca_mean_corr(R, Rg, energy=1.0)
    dims = "x".join(map(str, trunc.retained_dims))
    print(f"{kappa:>6} {linear_cka(R, Rg).value:>8.4f} {trunc.value:>11.4f} {dims:>7} "
          f"{full.value:>12.9f}")
