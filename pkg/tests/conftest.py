"""
公共测试夹具
"""
import numpy as np
import pytest

from src.sample_core import BivariateSample
from src.simulation import ModelSpec


@pytest.fixture
def model1() -> ModelSpec:
    return ModelSpec.marshall_olkin(3.0, 5.0 / 6.0, 2.0 / 3.0, name="model1")


@pytest.fixture
def model2() -> ModelSpec:
    return ModelSpec.marshall_olkin(3.0, 0.7, 0.7, name="model2")


@pytest.fixture
def model3() -> ModelSpec:
    return ModelSpec.pareto_mixture(3.0, 4.0, name="model3")


@pytest.fixture
def pareto_pair_sample() -> BivariateSample:
    """独立 Pareto(3) 样本对"""
    rng = np.random.default_rng(20240101)
    x = (1.0 - rng.random(400)) ** (-1.0 / 3.0)
    y = (1.0 - rng.random(400)) ** (-1.0 / 3.0)
    return BivariateSample(x=x, y=y)
