"""gaugelens: gauge freedom of hidden representations, made measurable.

Insert an invertible map D into a trained model's hidden layer, compensate
the readout with D^-1, and compare what moves (cosine similarity, nearest
neighbors) with what does not (whitened cosine, CKA, SVCCA, predictions).
"""
from .errors import *  # noqa: F401,F403
from .geometry import (FeatureBasis, GeometryReport, MetricTensor, RepresentationSet,
                       canonical_cosine, cosine_matrix, covariance, delta_cos_stats,
                       feature_gram, feature_readout, interference, metric_cosine,
                       spectrum_report, whiten)
from .linalg import (GaugeTransform, Spectrum, cond, inv_sqrt_psd, make_gauge, random_orthogonal,
                     svd, sym_eig)
from .model import (Dataset, InvarianceReport, MlpModel, accuracy, apply_gauge, hidden_reps, init_mlp,
                    make_blobs,
                    train_mlp, train_test_split, verify_invariance)
from .neighbors import NeighborLists, jaccard_at_k, knn_cosine, top1_flip_rate
from .simindex import SimilarityScore, linear_cka, svcca_mean_corr
from .dynamics import (PullbackMetric, RepJacobian, pullback_metric, rep_change_cov,
                       rep_jacobian_analytic, rep_jacobian_fd)

__version__ = "0.1.0"
