# %% [markdown]
# # Feature directions and interference
#
# Take k orthonormal feature directions in a d-dimensional space. Reading
# each feature with F^T h recovers its activation exactly. After a gauge the
# directions are no longer orthogonal in raw coordinates, so the readouts
# leak into each other, although the metric G = D^-T D^-1 restores them.

# %%
import numpy as np

from gaugelens import FeatureBasis, make_gauge, random_orthogonal
from gaugelens.geometry import feature_gram, feature_readout, interference

d, k, n = 32, 8, 500
rng = np.random.default_rng(0)
F = random_orthogonal(d, seed=0)[:, :k]
acts = np.abs(rng.standard_normal((k, n))) * (rng.random((k, n)) < 0.2)
basis = FeatureBasis(F, acts)
H = basis.synthesize()
print(f"interference {interference(basis):.1e}, "
      f"readout error {np.abs(feature_readout(basis, H) - acts).max():.1e}")

# %%
for kappa in (1, 5, 20, 100):
    g = make_gauge(d, kappa, seed=1)
    moved = basis.transform(g)
    # divide out each direction's squared length so only cross-talk remains
    scale = np.sum(moved.F ** 2, axis=0)[:, None]
    err = np.abs(feature_readout(moved, g.D @ H) / scale - acts).max() / acts.max()
    Ginv = g.Dinv.T @ g.Dinv
    gram = feature_gram(moved, Ginv)
    print(f"kappa {kappa:>4}: interference {interference(moved):.3f}, relative cross-talk {err:.3f}, "
          f"metric Gram off-identity {np.abs(gram - np.eye(k)).max():.1e}")
