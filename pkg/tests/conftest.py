from pathlib import Path

import numpy as np
import pytest

from edibnet.blur import BlurKernel, KernelBank
from edibnet.io import TrainSample
from edibnet.model import DepthMap, ModelConfig, ParamStore, build_model_config, init_params
from edibnet.tensor import Tensor

from gradcheck import check_gradients as _check_gradients

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def repo_root() -> Path:
    return ROOT


def small_config(**overrides) -> ModelConfig:
    values = dict(base_channels=4, decomposition_levels=1, encoder_blocks=(1, 1, 1), decoder_blocks=(1, 1, 1))
    values.update(overrides)
    return build_model_config(**values)


@pytest.fixture
def tiny_config() -> ModelConfig:
    """Level-1, 4-channel network; images must be multiples of 8."""
    return small_config()


@pytest.fixture
def tiny_config_l2() -> ModelConfig:
    """Level-2 variant of tiny_config; images must be multiples of 16."""
    return small_config(decomposition_levels=2)


@pytest.fixture
def make_config():
    return small_config


def randomized(params: ParamStore, rng: np.random.Generator, scale: float = 0.2) -> ParamStore:
    """Copy of ``params`` with every tensor (zero-initialized heads included) drawn from N(0, scale)."""
    return ParamStore({name: Tensor(rng.normal(0.0, scale, t.shape)) for name, t in params.items()})


@pytest.fixture
def randomize():
    return randomized


@pytest.fixture
def random_params(tiny_config, rng):
    return randomized(init_params(tiny_config), rng)


@pytest.fixture
def check_gradients():
    return _check_gradients


def smooth_image(rng: np.random.Generator, h: int, w: int, n: int = 1) -> Tensor:
    """Random image with low-frequency structure, values in [0, 1]."""
    yy, xx = np.mgrid[0:h, 0:w] / max(h, w)
    planes = []
    for _ in range(n * 3):
        fy, fx, phase = rng.uniform(1.0, 4.0), rng.uniform(1.0, 4.0), rng.uniform(0, 2 * np.pi)
        planes.append(0.5 + 0.4 * np.sin(2 * np.pi * (fy * yy + fx * xx) + phase))
    return Tensor(np.stack(planes).reshape(n, 3, h, w))


@pytest.fixture
def make_image():
    return smooth_image


@pytest.fixture
def kernel_bank() -> KernelBank:
    return KernelBank([BlurKernel.box(3), BlurKernel("gauss3", np.array([[1, 2, 1], [2, 4, 2], [1, 2, 1]]))])


@pytest.fixture
def train_samples(rng):
    samples = []
    for i in range(3):
        image = smooth_image(rng, 32, 32)
        depth = DepthMap(Tensor(rng.uniform(0.0, 1.0, (1, 1, 8, 8))))
        samples.append(TrainSample(f"img{i}", image, depth))
    return samples
