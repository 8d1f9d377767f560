import numpy as np
import pytest

from gaugelens.errors import DomainError, ShapeError
from gaugelens.geometry import RepresentationSet
from gaugelens.io import (load_model, read_dataset_csv, read_reps_csv, save_model,
                          write_dataset_csv, write_reps_csv)
from gaugelens.linalg import make_gauge
from gaugelens.model import apply_gauge, init_mlp, make_blobs


def awkward_doubles(rng, shape):
    x = rng.standard_normal(shape) * 10.0 ** rng.integers(-300, 300, shape)
    x.flat[:4] = [np.nextafter(1.0, 2.0), 5e-324, -0.0, 1.7976931348623157e308][: x.size]
    return x


def test_dataset_roundtrip(tmp_path):
    data = make_blobs(3, 3, 20, seed=2)
    path = tmp_path / "d.csv"
    write_dataset_csv(path, data)
    assert path.read_text().splitlines()[0] == "label,f0,f1,f2"
    back = read_dataset_csv(path)
    np.testing.assert_array_equal(back.X, data.X)
    np.testing.assert_array_equal(back.y, data.y)
    assert back.C == 3


@pytest.mark.parametrize("body, err", [
    ("label,x0\n0,1\n1,2\n", DomainError),
    ("label,f0\n0,nan\n1,2\n", DomainError),
    ("label,f0\n0,inf\n1,2\n", DomainError),
    ("label,f0\n-1,1\n1,2\n", DomainError),
    ("label,f0\n0,1,2\n1,2\n", ShapeError),
])
def test_dataset_rejects(tmp_path, body, err):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(err):
        read_dataset_csv(path)


def test_reps_roundtrip(tmp_path, rng):
    R = RepresentationSet(awkward_doubles(rng, (4, 9)), np.arange(9) % 2)
    path = tmp_path / "r.csv"
    write_reps_csv(path, R)
    lines = path.read_text().splitlines()
    assert lines[0] == "dim0,dim1,dim2,dim3,label" and len(lines) == 10
    back = read_reps_csv(path)
    assert back.H.tobytes() == R.H.tobytes()
    np.testing.assert_array_equal(back.labels, R.labels)


def test_reps_without_labels(tmp_path, rng):
    R = RepresentationSet(rng.standard_normal((2, 5)))
    path = tmp_path / "r.csv"
    write_reps_csv(path, R)
    assert read_reps_csv(path).labels is None


def test_reps_reject_nan(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("dim0,dim1\n1,NaN\n")
    with pytest.raises(DomainError):
        read_reps_csv(path)


def test_checkpoint_bit_exact(tmp_path, rng):
    m = init_mlp(3, 5, 2, seed=1)
    m = m.with_theta(awkward_doubles(rng, m.n_params))
    path = tmp_path / "m.txt"
    save_model(path, m)
    text = path.read_text().splitlines()
    assert text[0] == "GAUGELENS-MLP v1" and text[1] == "3 5 2"
    back = load_model(path)
    assert back.theta.tobytes() == m.theta.tobytes()
    assert back.gauge is None


def test_checkpoint_with_gauge(tmp_path):
    m = apply_gauge(init_mlp(3, 5, 2, seed=1), make_gauge(5, 7.0, seed=4))
    path = tmp_path / "m.txt"
    save_model(path, m)
    assert "GAUGE" in path.read_text().splitlines()
    back = load_model(path)
    assert back.gauge.D.tobytes() == m.gauge.D.tobytes()
    assert back.theta.tobytes() == m.theta.tobytes()
    x = np.ones((3, 2))
    np.testing.assert_array_equal(back.logits(x), m.logits(x))


@pytest.mark.parametrize("text", ["NOT-A-MODEL\n", "GAUGELENS-MLP v1\n1 1\n",
                                  "GAUGELENS-MLP v1\n1 1 2\n0.5\n"])
def test_checkpoint_rejects(tmp_path, text):
    path = tmp_path / "m.txt"
    path.write_text(text)
    with pytest.raises((DomainError, ShapeError)):
        load_model(path)
