# %% [markdown]
# # Distortion grows with the condition number
#
# Orthogonal gauges (kappa = 1) preserve every cosine. As kappa grows the
# cosine structure and the nearest-neighbour graph drift further, while the
# model's predictions stay fixed.

# %%
import numpy as np

from gaugelens import (apply_gauge, cosine_matrix, delta_cos_stats, hidden_reps, jaccard_at_k,
                       knn_cosine, make_blobs, make_gauge, top1_flip_rate, train_mlp,
                       train_test_split, verify_invariance)

train, test = train_test_split(make_blobs(16, 4, 1000, spread=5.0, seed=1), seed=0)
model = train_mlp(train, d_h=64, epochs=50, lr=0.1, seed=0)

C0 = cosine_matrix(hidden_reps(model, test.X))
nn0 = knn_cosine(C0, k=10)

# %%
print(f"{'kappa':>6} {'mean|dcos|':>11} {'Jaccard@10':>11} {'top1 flip':>10} {'agree':>6}")
for kappa in (1, 2, 5, 10, 20, 50):
    rows = []
    for seed in range(5):
        gauged = apply_gauge(model, make_gauge(64, kappa, seed=seed))
        C1 = cosine_matrix(hidden_reps(gauged, test.X))
        nn1 = knn_cosine(C1, k=10)
        rows.append((delta_cos_stats(C0, C1).mean_abs_dcos, jaccard_at_k(nn0, nn1),
                     top1_flip_rate(nn0, nn1),
                     verify_invariance(model, gauged, test.X).prediction_agreement))
    d, j, f, a = np.median(rows, axis=0)
    print(f"{kappa:>6} {d:>11.4f} {j:>11.3f} {f:>10.3f} {a:>6.1f}")

# %% [markdown]
# The same table (per seed, with medians and an SVG) comes from
# `gaugelens sweep --out out/`.
