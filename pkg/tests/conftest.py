from pathlib import Path

import numpy as np
import pytest

from smoothrank import MaskSpec, load_arff, mcar_mask, synthesize
from smoothrank.evaluation import build_instance

DATA_DIR = Path(__file__).resolve().parents[1] / "data"


@pytest.fixture(scope="session")
def emotions():
    return load_arff(DATA_DIR / "emotions.arff")


@pytest.fixture(scope="session")
def yeast():
    return load_arff(DATA_DIR / "yeast.arff")


@pytest.fixture(scope="session")
def cal500():
    return load_arff(DATA_DIR / "cal500.arff")


def small_instance(seed, n=20, d=10, t=5, r=2, rate=0.6):
    """A 20x(5+10+1) rank-2 instance with 60% observed entries."""
    ds, model = synthesize(n, d, t, r, 0.0, seed)
    obs_x, obs_y = mcar_mask(n, d, t, MaskSpec(rate, seed=seed + 500))
    instance, _ = build_instance(ds, obs_x, obs_y, standardize_features=False)
    return ds, model, instance, obs_x, obs_y


@pytest.fixture
def rng():
    return np.random.default_rng(0)
