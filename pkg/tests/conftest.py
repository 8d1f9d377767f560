import numpy as np
import pytest

from gaugelens.model import init_mlp, make_blobs, train_mlp, train_test_split


@pytest.fixture(scope="session")
def blobs_split():
    return train_test_split(make_blobs(16, 4, 400, spread=5.0, seed=1), seed=0)


@pytest.fixture(scope="session")
def trained(blobs_split):
    train, _ = blobs_split
    return train_mlp(train, d_h=64, epochs=50, lr=0.1, seed=0)


@pytest.fixture(scope="session")
def small_model():
    return init_mlp(3, 4, 2, seed=5)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
