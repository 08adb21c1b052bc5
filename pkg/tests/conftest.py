from pathlib import Path

import pytest

from affectsim.model import ModelParams

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = REPO_ROOT / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture()
def default_params() -> ModelParams:
    return ModelParams()


def noiseless_params() -> ModelParams:
    base = ModelParams().to_dict()
    base["valence"]["A_v"] = 0.0
    base["arousal"]["A_a"] = 0.0
    return ModelParams.from_dict(base)


@pytest.fixture()
def quiet_params() -> ModelParams:
    return noiseless_params()
