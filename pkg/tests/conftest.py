"""
Shared fixtures; points data and output directories at a scratch location
before any project module reads its configuration
"""
import os
import tempfile

import numpy as np
import pytest

_SCRATCH = tempfile.mkdtemp(prefix="cue-lab-tests-")
os.environ.setdefault("LAB_DATA_DIR", os.path.join(_SCRATCH, "data"))
os.environ.setdefault("LAB_OUTPUT_DIR", os.path.join(_SCRATCH, "results"))
os.environ["LAB_QUIET"] = "1"


@pytest.fixture
def stream():
    from src.sampling.streams import make_stream
    return make_stream(12345, 0)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def corpus():
    from src.toeplitz.corpus import load_corpus
    return {record.name: record for record in load_corpus()}
