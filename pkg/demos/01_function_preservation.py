# %% [markdown]
# # A gauge transform leaves the network unchanged
#
# Train a small tanh MLP on Gaussian blobs, then insert an invertible matrix D
# after the hidden layer and multiply the readout by D^-1. The hidden vectors
# change; the logits do not.

# %%
import numpy as np

from gaugelens import (accuracy, apply_gauge, cosine_matrix, delta_cos_stats, hidden_reps,
                       make_blobs, make_gauge, train_mlp, train_test_split, verify_invariance)

data = make_blobs(d_in=16, C=4, n=1000, spread=5.0, seed=1)
train, test = train_test_split(data, seed=0)
model = train_mlp(train, d_h=64, epochs=50, lr=0.1, seed=0)
print(f"test accuracy {accuracy(model, test):.3f}")

# %% [markdown]
# A general gauge with condition number 10: D = U diag(s) V^T with
# log-spaced singular values between 1 and 10.

# %%
g = make_gauge(64, kappa=10.0, seed=0)
gauged = apply_gauge(model, g)
inv = verify_invariance(model, gauged, test.X)
print(f"prediction agreement {inv.prediction_agreement}, max logit diff {inv.max_logit_diff:.1e}")

H, Hg = hidden_reps(model, test.X).H, hidden_reps(gauged, test.X).H
print(f"max |h' - h| = {np.abs(Hg - H).max():.2f}")

# %% [markdown]
# Same predictions, different coordinates. Cosine similarity in those
# coordinates is not preserved:

# %%
stats = delta_cos_stats(cosine_matrix(H), cosine_matrix(Hg))
print(f"mean |dcos| {stats.mean_abs_dcos:.3f}, max |dcos| {stats.max_abs_dcos:.3f}")

# %% [markdown]
# Gauges compose. Applying a second gauge to the already gauged model still
# gives the original function.

# %%
twice = apply_gauge(gauged, make_gauge(64, kappa=50.0, seed=1))
print(f"composite kind {twice.gauge.kind!r}, "
      f"agreement {verify_invariance(model, twice, test.X).prediction_agreement}")
