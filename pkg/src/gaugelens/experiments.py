"""Experiment drivers behind the ``gaugelens`` subcommands.

Every driver takes a :class:`RunConfig`, writes its CSV (and SVG) reports to
``config.out`` and returns the rows it wrote. Gauge jobs are independent and
may run in worker processes; rows are always emitted in (kappa, seed) order.
"""
from __future__ import annotations

import logging
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import RunConfig
from .dynamics import (block_diag_omega, pullback_metric, rep_change_cov, rep_jacobian_analytic,
                       rep_jacobian_fd)
from .errors import ConfigError, InvarianceViolation
from .geometry import (HIST_BINS, canonical_cosine, cosine_matrix, delta_cos_stats, spectrum_report,
                       whiten)
from .io import fmt, load_model, read_dataset_csv, save_model
from .linalg import make_gauge
from .model import (MlpModel, accuracy, apply_gauge, hidden_reps, make_blobs, train_mlp,
                    train_test_split, verify_invariance)
from .neighbors import jaccard_at_k, knn_cosine, top1_flip_rate
from .simindex import linear_cka, svcca_mean_corr
from .svg import histogram_pair, line_panels

log = logging.getLogger(__name__)

__all__ = [
    "SweepReport",
    "prepare",
    "write_csv",
    "cmd_train",
    "cmd_sanity",
    "cmd_sweep",
    "cmd_whiten",
    "cmd_compare",
    "cmd_dynamics",
    "COMMANDS",
]

SCHEMA = "gaugelens v1"
MAX_LOGIT_DIFF = 1e-4
SWEEP_COLUMNS = ["kappa", "seed", "mean_abs_dcos", "max_abs_dcos", "jaccard_at_k", "top1_flip",
                 "agreement", "max_logit_diff"]


@dataclass
class SweepReport:
    rows: list = field(default_factory=list)
    medians: list = field(default_factory=list)


@dataclass
class Prepared:
    model: MlpModel
    train: object
    test: object
    fresh: bool


def prepare(cfg: RunConfig) -> Prepared:
    """Load or synthesize the data, split it, and train or load the model."""
    if cfg.dataset == "blobs":
        data = make_blobs(cfg.d_in, cfg.classes, cfg.n, cfg.spread, seed=cfg.seed + 1)
    else:
        data = read_dataset_csv(cfg.dataset[len("csv:"):])
    train, test = train_test_split(data, cfg.test_fraction, seed=cfg.seed)
    if cfg.model:
        model = load_model(cfg.model)
        if model.d_in != data.d_in or model.C < data.C:
            raise ConfigError(f"checkpoint {cfg.model} does not match the dataset dimensions")
        fresh = False
    else:
        model = train_mlp(train, d_h=cfg.d_h, epochs=cfg.epochs, lr=cfg.lr, seed=cfg.seed)
        fresh = True
    if cfg.k >= test.n:
        raise ConfigError(f"k={cfg.k} must be smaller than the test split size {test.n}")
    return Prepared(model, train, test, fresh)


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


def write_csv(path, command, header, rows):
    """Versioned CSV: a ``# gaugelens v1 <command>`` line, the header, then rows."""
    lines = [f"# {SCHEMA} {command}", ",".join(header)]
    lines += [",".join(_cell(row[h]) for h in header) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _outdir(cfg):
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# worker-side state for gauge jobs
_CTX = {}


def _init_worker(ctx):
    _CTX.clear()
    _CTX.update(ctx)


def _gauge_job(job):
    kappa, seed = job
    model, X, k, kind = _CTX["model"], _CTX["X"], _CTX["k"], _CTX["kind"]
    g = make_gauge(model.d_h, kappa, kind, seed)
    gauged = apply_gauge(model, g)
    inv = verify_invariance(model, gauged, X)
    R2 = hidden_reps(gauged, X)
    C2 = cosine_matrix(R2)
    stats = delta_cos_stats(_CTX["C"], C2)
    nn2 = knn_cosine(C2, k)
    row = dict(
        kappa=float(kappa), seed=int(seed),
        mean_abs_dcos=stats.mean_abs_dcos, max_abs_dcos=stats.max_abs_dcos,
        jaccard_at_k=jaccard_at_k(_CTX["nn"], nn2), top1_flip=top1_flip_rate(_CTX["nn"], nn2),
        agreement=inv.prediction_agreement, max_logit_diff=inv.max_logit_diff,
        hist_before=stats.cos_histogram_before, hist_after=stats.cos_histogram_after,
    )
    if _CTX.get("compare"):
        R = _CTX["R"]
        row["linear_cka"] = linear_cka(R, R2).value
        svc = svcca_mean_corr(R, R2, energy=_CTX["energy"])
        row["svcca"] = svc.value
        row["svcca_dims"] = f"{svc.retained_dims[0]}x{svc.retained_dims[1]}"
        row["svcca_full"] = svcca_mean_corr(R, R2, energy=1.0).value
    return row


def run_gauge_jobs(model, X, jobs, cfg, compare=False):
    """Evaluate ``(kappa, seed)`` jobs, optionally in worker processes; order preserved."""
    R = hidden_reps(model, X)
    C = cosine_matrix(R)
    ctx = dict(model=model, X=X, k=cfg.k, kind=cfg.kind, C=C, nn=knn_cosine(C, cfg.k),
               R=R, compare=compare, energy=cfg.energy)
    jobs = sorted(jobs)
    if cfg.workers == 1:
        _init_worker(ctx)
        rows = [_gauge_job(j) for j in jobs]
    else:
        mp = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(cfg.workers, mp_context=mp, initializer=_init_worker,
                                 initargs=(ctx,)) as pool:
            rows = list(pool.map(_gauge_job, jobs))
    bad = [r for r in rows if r["agreement"] != 1.0 or not r["max_logit_diff"] <= MAX_LOGIT_DIFF]
    if bad:
        r = bad[0]
        raise InvarianceViolation(
            f"gauge kappa={r['kappa']} seed={r['seed']} changed the model function "
            f"(agreement {r['agreement']}, max logit diff {r['max_logit_diff']:.3e})"
        )
    return rows


def _gauge_seeds(cfg):
    return [cfg.seed + i for i in range(cfg.seeds)]


def cmd_train(cfg: RunConfig):
    prep = prepare(cfg)
    out = _outdir(cfg)
    save_model(out / "model.txt", prep.model)
    rows = [dict(epoch=i, loss=loss) for i, loss in enumerate(prep.model.loss_history)]
    write_csv(out / "train.csv", "train", ["epoch", "loss"], rows)
    summary = [dict(split="train", n=prep.train.n, accuracy=accuracy(prep.model, prep.train)),
               dict(split="test", n=prep.test.n, accuracy=accuracy(prep.model, prep.test))]
    write_csv(out / "accuracy.csv", "train", ["split", "n", "accuracy"], summary)
    log.info("test accuracy %.4f", summary[1]["accuracy"])
    return summary


def cmd_sanity(cfg: RunConfig) -> SweepReport:
    """One gauge per kappa (default 10) on the test split: function check plus distortion."""
    prep = prepare(cfg)
    kappas = cfg.kappas(default=(10.0,))
    rows = run_gauge_jobs(prep.model, prep.test.X, [(kp, cfg.seed) for kp in kappas], cfg)
    out = _outdir(cfg)
    write_csv(out / "sanity.csv", "sanity", SWEEP_COLUMNS, rows)
    edges = np.linspace(-1.0, 1.0, HIST_BINS + 1)
    hist_rows = [
        dict(kappa=r["kappa"], bin_lo=edges[b], bin_hi=edges[b + 1],
             before=int(r["hist_before"][b]), after=int(r["hist_after"][b]))
        for r in rows for b in range(HIST_BINS)
    ]
    write_csv(out / "cosine_hist.csv", "sanity", ["kappa", "bin_lo", "bin_hi", "before", "after"],
              hist_rows)
    last = rows[-1]
    (out / "cosine_hist.svg").write_text(
        histogram_pair(list(edges), list(last["hist_before"]), list(last["hist_after"]),
                       f"Pairwise cosine before/after gauge (kappa = {last['kappa']:g})"),
        encoding="utf-8", newline="\n")
    return SweepReport(rows)


def _medians(rows, keys):
    out = []
    for kappa in sorted({r["kappa"] for r in rows}):
        group = [r for r in rows if r["kappa"] == kappa]
        med = dict(kappa=kappa, seed="median")
        for key in keys:
            med[key] = float(np.median([r[key] for r in group]))
        out.append(med)
    return out


def _interleave(rows, medians):
    merged = []
    for med in medians:
        merged += [r for r in rows if r["kappa"] == med["kappa"]]
        merged.append(med)
    return merged


def cmd_sweep(cfg: RunConfig) -> SweepReport:
    """Distortion metrics over the kappa grid and gauge seeds, with per-kappa medians."""
    kappas = cfg.kappas()
    if list(kappas) != sorted(kappas):
        raise ConfigError("kappa list must be sorted ascending for a sweep")
    prep = prepare(cfg)
    jobs = [(kp, s) for kp in kappas for s in _gauge_seeds(cfg)]
    rows = run_gauge_jobs(prep.model, prep.test.X, jobs, cfg)
    medians = _medians(rows, SWEEP_COLUMNS[2:])
    out = _outdir(cfg)
    write_csv(out / "sweep.csv", "sweep", SWEEP_COLUMNS, _interleave(rows, medians))
    ks = [m["kappa"] for m in medians]
    panels = [
        dict(title="median mean |delta cos|", ylabel="mean |dcos|",
             series={"mean |dcos|": (ks, [m["mean_abs_dcos"] for m in medians])}),
        dict(title=f"median Jaccard@{cfg.k}", ylabel="Jaccard",
             series={"Jaccard": (ks, [m["jaccard_at_k"] for m in medians])}),
        dict(title="median top-1 flip rate", ylabel="flip rate",
             series={"flip": (ks, [m["top1_flip"] for m in medians])}),
    ]
    (out / "sweep.svg").write_text(line_panels(panels, "condition number kappa", logx=True),
                                   encoding="utf-8", newline="\n")
    return SweepReport(rows, medians)


def cmd_whiten(cfg: RunConfig):
    """Covariance spectrum before/after whitening and canonical-cosine gauge residual."""
    prep = prepare(cfg)
    R = hidden_reps(prep.model, prep.test.X)
    before = spectrum_report(R).eigenvalues
    W, _ = whiten(R)
    after = spectrum_report(W).eigenvalues
    base = canonical_cosine(R)
    kappa = max(cfg.kappas())
    residual = 0.0
    for s in _gauge_seeds(cfg):
        g = make_gauge(R.d, kappa, cfg.kind, s)
        residual = max(residual, float(np.max(np.abs(canonical_cosine(R.transform(g)) - base))))
    out = _outdir(cfg)
    rows = [dict(index=i, before=b, after=a) for i, (b, a) in enumerate(zip(before, after))]
    write_csv(out / "spectrum.csv", "whiten", ["index", "before", "after"], rows)
    summary = [
        dict(metric="eig_max_before", value=float(before[0])),
        dict(metric="eig_min_before", value=float(before[-1])),
        dict(metric="mean_abs_eig_minus_1_after", value=float(np.mean(np.abs(after - 1.0)))),
        dict(metric="canonical_cosine_residual", value=residual),
        dict(metric="residual_kappa", value=float(kappa)),
        dict(metric="residual_gauges", value=len(_gauge_seeds(cfg))),
    ]
    write_csv(out / "whiten_summary.csv", "whiten", ["metric", "value"], summary)
    idx = list(range(1, len(before) + 1))
    panel = dict(title="covariance eigenvalues before and after whitening", ylabel="eigenvalue",
                 logy=True, series={"before": (idx, list(before)), "after": (idx, list(after))})
    (out / "spectrum.svg").write_text(line_panels([panel], "eigenvalue index"),
                                      encoding="utf-8", newline="\n")
    return summary


def cmd_compare(cfg: RunConfig) -> SweepReport:
    """Cosine distortion against CKA and SVCCA between H and D H over the kappa grid."""
    prep = prepare(cfg)
    jobs = [(kp, s) for kp in cfg.kappas() for s in _gauge_seeds(cfg)]
    rows = run_gauge_jobs(prep.model, prep.test.X, jobs, cfg, compare=True)
    header = ["kappa", "seed", "mean_abs_dcos", "linear_cka", "svcca", "svcca_dims", "svcca_full",
              "agreement"]
    write_csv(_outdir(cfg) / "simindex.csv", "compare", header, rows)
    return SweepReport(rows)


def cmd_dynamics(cfg: RunConfig):
    """Jacobian checks at the first ``probes`` test inputs under a gauge of the largest kappa."""
    prep = prepare(cfg)
    model = prep.model
    g = make_gauge(model.d_h, max(cfg.kappas()), cfg.kind, cfg.seed)
    gauged = apply_gauge(model, g)
    omega = block_diag_omega(model)
    rows = []
    for i in range(min(cfg.probes, prep.test.n)):
        x = prep.test.X[:, i]
        J = rep_jacobian_analytic(model, x).J
        J_fd = rep_jacobian_fd(model, x, step=cfg.fd_step).J
        J_g = rep_jacobian_analytic(gauged, x).J
        G = pullback_metric(J).G
        G_g = pullback_metric(J_g).G
        lam = np.linalg.eigvalsh(G)
        gnorm = float(np.max(np.abs(G)))
        DJ = g.D @ J
        cov_eigs = np.linalg.eigvalsh(rep_change_cov(J, omega))[::-1]
        row = dict(
            probe=i,
            fd_rel_err=float(np.max(np.abs(J - J_fd)) / np.max(np.abs(J))),
            pullback_min_eig=float(lam[0]),
            pullback_norm=gnorm,
            jacobian_gauge_residual=float(np.max(np.abs(J_g - DJ))),
            metric_gauge_residual=float(np.max(np.abs(G_g - DJ.T @ DJ)) / max(1.0, np.max(np.abs(G_g)))),
        )
        for j in range(5):
            row[f"cov_eig{j + 1}"] = float(cov_eigs[j]) if j < cov_eigs.size else 0.0
        rows.append(row)
    header = list(rows[0])
    write_csv(_outdir(cfg) / "dynamics.csv", "dynamics", header, rows)
    return rows


COMMANDS = {
    "train": cmd_train,
    "sanity": cmd_sanity,
    "sweep": cmd_sweep,
    "whiten": cmd_whiten,
    "compare": cmd_compare,
    "dynamics": cmd_dynamics,
}
