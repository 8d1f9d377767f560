import csv

import pytest

from gaugelens import experiments
from gaugelens.cli import main

FAST = ["--n", "200", "--d-h", "16", "--epochs", "5", "--seeds", "2"]


def run(tmp_path, *args, out="out"):
    return main([*args, *FAST, "--out", str(tmp_path / out)])


def read_rows(path):
    lines = path.read_text().splitlines()
    return lines[0], list(csv.DictReader(lines[1:]))


EXPECTED = {
    "train": ["model.txt", "train.csv", "accuracy.csv"],
    "sanity": ["sanity.csv", "cosine_hist.csv", "cosine_hist.svg"],
    "sweep": ["sweep.csv", "sweep.svg"],
    "whiten": ["spectrum.csv", "whiten_summary.csv", "spectrum.svg"],
    "compare": ["simindex.csv"],
    "dynamics": ["dynamics.csv"],
}


@pytest.mark.parametrize("command", sorted(EXPECTED))
def test_command_outputs(tmp_path, command):
    assert run(tmp_path, command, "--kappa", "1,10", "--probes", "2") == 0
    for name in EXPECTED[command]:
        path = tmp_path / "out" / name
        assert path.stat().st_size > 0
        if name.endswith(".csv"):
            assert path.read_text().startswith(f"# gaugelens v1 {command}\n")
        if name.endswith(".svg"):
            assert path.read_text().lstrip().startswith("<svg")


def test_sanity_null_and_distortion(tmp_path):
    assert run(tmp_path, "sanity", "--kappa", "1,10") == 0
    _, rows = read_rows(tmp_path / "out" / "sanity.csv")
    null, warped = rows
    assert float(null["kappa"]) == 1.0
    assert float(null["mean_abs_dcos"]) <= 1e-10
    assert float(null["jaccard_at_k"]) == 1.0 and float(null["top1_flip"]) == 0.0
    assert float(warped["mean_abs_dcos"]) > 0.01
    assert float(warped["jaccard_at_k"]) < 1.0
    assert all(float(r["agreement"]) == 1.0 for r in rows)


def test_sweep_has_medians(tmp_path):
    assert run(tmp_path, "sweep", "--kappa", "1,5") == 0
    _, rows = read_rows(tmp_path / "out" / "sweep.csv")
    assert [r["seed"] for r in rows] == ["0", "1", "median", "0", "1", "median"]


def test_rerun_is_byte_identical(tmp_path):
    assert run(tmp_path, "sweep", "--kappa", "1,2,5", out="a") == 0
    assert run(tmp_path, "sweep", "--kappa", "1,2,5", out="b") == 0
    assert run(tmp_path, "sweep", "--kappa", "1,2,5", "--workers", "2", out="c") == 0
    a = (tmp_path / "a" / "sweep.csv").read_bytes()
    assert a == (tmp_path / "b" / "sweep.csv").read_bytes()
    assert a == (tmp_path / "c" / "sweep.csv").read_bytes()
    assert (tmp_path / "a" / "sweep.svg").read_bytes() == (tmp_path / "c" / "sweep.svg").read_bytes()


def test_saved_model_is_reused(tmp_path):
    assert run(tmp_path, "train", out="m") == 0
    model = str(tmp_path / "m" / "model.txt")
    assert run(tmp_path, "sanity", "--model", model, out="a") == 0
    assert main(["sanity", "--n", "200", "--seeds", "2", "--epochs", "1", "--d-h", "16",
                 "--model", model, "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "sanity.csv").read_bytes() == (tmp_path / "b" / "sanity.csv").read_bytes()


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# desk run\nn = 200\nd_h = 16\nepochs = 5\nkappa = 1, 3\n")
    out = tmp_path / "out"
    assert main(["sanity", "--config", str(cfg), "--kappa", "4", "--out", str(out)]) == 0
    _, rows = read_rows(out / "sanity.csv")
    assert [float(r["kappa"]) for r in rows] == [4.0]


@pytest.mark.parametrize("args", [
    ["sweep", "--kappa", "5,1"],
    ["sanity", "--kappa", "0.5"],
    ["sanity", "--lr", "-1"],
    ["sanity", "--k", "500"],
    ["sanity", "--dataset", "mnist"],
    ["sanity", "--spread", "wide"],
])
def test_exit_config(tmp_path, args, capsys):
    assert run(tmp_path, *args) == 2
    assert "invalid input" in capsys.readouterr().err


def test_exit_unknown_config_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["sanity", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_exit_unknown_flag(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["sanity", "--bogus", "1"])
    assert exc.value.code == 2


def test_exit_invariance(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(experiments, "MAX_LOGIT_DIFF", -1.0)
    assert run(tmp_path, "sanity") == 3
    assert "invariance violation" in capsys.readouterr().err


def test_exit_numeric(tmp_path):
    assert run(tmp_path, "train", "--lr", "1e308") == 4
