import os

import numpy as np
import pytest

# keep the CPU backend single-threaded and quiet before it loads
os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "3")
os.environ.setdefault("OMP_NUM_THREADS", "1")


@pytest.fixture
def rng():
    return np.random.default_rng(7)
