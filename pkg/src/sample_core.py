"""
样本核心模块
二元损失样本的数据模型、次序统计量、秩以及经验边际分位数
所有估计量共享同一份排序缓存
"""
from functools import cached_property
from typing import Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import settings
from .utils import SampleValidationException, ConfigException

MIN_SAMPLE_SIZE = 4

ArrayLike = Union[Sequence[float], np.ndarray]


def _as_readonly_array(values: ArrayLike, name: str) -> np.ndarray:
    """转换为只读 float64 一维数组"""
    try:
        arr = np.array(values, dtype=np.float64).reshape(-1)
    except (TypeError, ValueError) as e:
        raise SampleValidationException(f"{name} 无法转换为实数序列: {e}", details={"field": name})
    arr.flags.writeable = False
    return arr


def _stable_order(values: np.ndarray) -> np.ndarray:
    """按 (取值, 原始下标) 字典序排序的下标"""
    return np.argsort(values, kind="stable")


class RankVectors(BaseModel):
    """秩向量，取值 1..n；相同取值按原始下标先后打破平局"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    rx: np.ndarray = Field(..., description="x 的秩")
    ry: np.ndarray = Field(..., description="y 的秩")

    @property
    def n(self) -> int:
        return int(self.rx.shape[0])


class BivariateSample(BaseModel):
    """成对损失观测 (x_i, y_i)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x: np.ndarray = Field(..., description="X 的损失观测")
    y: np.ndarray = Field(..., description="Y 的损失观测")

    @field_validator("x", "y", mode="before")
    @classmethod
    def _convert(cls, v, info):
        return _as_readonly_array(v, info.field_name)

    @model_validator(mode="after")
    def _check(self):
        if self.x.shape[0] != self.y.shape[0]:
            raise SampleValidationException(
                "x 与 y 长度不一致",
                details={"len_x": int(self.x.shape[0]), "len_y": int(self.y.shape[0])}
            )
        if self.x.shape[0] < MIN_SAMPLE_SIZE:
            raise SampleValidationException(
                f"样本量至少为 {MIN_SAMPLE_SIZE}",
                details={"n": int(self.x.shape[0])}
            )
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))):
            raise SampleValidationException("样本包含 NaN 或无穷值")
        return self

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    @cached_property
    def order_x(self) -> np.ndarray:
        return _stable_order(self.x)

    @cached_property
    def order_y(self) -> np.ndarray:
        return _stable_order(self.y)

    @cached_property
    def sorted_x(self) -> np.ndarray:
        arr = self.x[self.order_x]
        arr.flags.writeable = False
        return arr

    @cached_property
    def sorted_y(self) -> np.ndarray:
        arr = self.y[self.order_y]
        arr.flags.writeable = False
        return arr

    @cached_property
    def ranks(self) -> RankVectors:
        return RankVectors(rx=_ranks_from_order(self.order_x), ry=_ranks_from_order(self.order_y))

    def scaled(self, cx: float = 1.0, cy: float = 1.0) -> "BivariateSample":
        """返回缩放后的新样本"""
        return BivariateSample(x=self.x * cx, y=self.y * cy)


def _ranks_from_order(order: np.ndarray) -> np.ndarray:
    ranks = np.empty(order.shape[0], dtype=np.int64)
    ranks[order] = np.arange(1, order.shape[0] + 1)
    ranks.flags.writeable = False
    return ranks


class TailConfig(BaseModel):
    """尾部超参数：k（CoVaR/CoES/ξ）、k1（γ₁）、k2（η）与极端水平 τ′"""
    model_config = ConfigDict(frozen=True)

    k: int = Field(..., description="CoVaR/CoES/ξ 使用的中间尾部样本数", ge=1)
    k1: int = Field(..., description="Hill 估计 γ₁ 使用的尾部样本数", ge=1)
    k2: int = Field(..., description="η 估计使用的尾部样本数", ge=1)
    tau_prime: float = Field(..., description="极端概率水平", gt=0.0, lt=1.0)

    def threshold_count(self, n: int) -> int:
        """m = ceil(k²/n)，整数运算"""
        return -(-self.k * self.k // n)

    def validate_for(self, n: int) -> "TailConfig":
        """检查配置对样本量 n 是否有效"""
        for name in ("k", "k1", "k2"):
            value = getattr(self, name)
            if not 1 <= value <= n - 1:
                raise ConfigException(
                    f"{name}={value} 超出范围 [1, {n - 1}]",
                    details={"parameter": name, "value": value, "n": n}
                )
        return self

    def low_threshold_warning(self, n: int) -> bool:
        """k²/n 低于告警阈值时 ξ̂ 容易退化"""
        return self.k * self.k / n < settings.xi_low_m_warning


def compute_ranks(sample: BivariateSample) -> RankVectors:
    """计算秩（使用样本缓存）；秩 n 对应最大值"""
    return sample.ranks


def order_statistic(values: ArrayLike, r: int) -> float:
    """
    第 r 小的次序统计量 X_{r,n}

    Args:
        values: 实数序列
        r: 1..n

    Returns:
        float: 第 r 小的值
    """
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    n = arr.shape[0]
    if not 1 <= r <= n:
        raise ConfigException(f"次序 r={r} 超出范围 [1, {n}]", details={"r": r, "n": n})
    return float(np.partition(arr, r - 1)[r - 1])


def empirical_var(values: ArrayLike, k: int) -> float:
    """中间水平 1-k/n 的经验 VaR，即 X_{n-k,n}"""
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    n = arr.shape[0]
    if not 1 <= k <= n - 1:
        raise ConfigException(f"k={k} 超出范围 [1, {n - 1}]", details={"k": k, "n": n})
    return order_statistic(arr, n - k)


def sorted_order_statistic(sorted_values: np.ndarray, r: int) -> float:
    """从已排序缓存读取 X_{r,n}"""
    n = sorted_values.shape[0]
    if not 1 <= r <= n:
        raise ConfigException(f"次序 r={r} 超出范围 [1, {n}]", details={"r": r, "n": n})
    return float(sorted_values[r - 1])


__all__ = [
    "BivariateSample", "RankVectors", "TailConfig",
    "compute_ranks", "order_statistic", "empirical_var", "sorted_order_statistic",
    "MIN_SAMPLE_SIZE",
]
