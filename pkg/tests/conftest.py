import os

import numpy as np
import pytest

from cosample import backend, load_corpus

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
CORPUS_DIR = os.path.join(DATA_DIR, "corpus")


@pytest.fixture(scope="session")
def corpus():
    """The committed 64x64 grayscale crops."""
    return load_corpus(CORPUS_DIR)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def keep_backend():
    prev = backend.current()
    yield
    backend.set_backend(prev)
