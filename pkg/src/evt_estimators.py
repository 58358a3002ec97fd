"""
极值估计量模块
中间水平上的极值指数 γ₁（Hill）、尾部相依系数 η、经验尾部 copula 以及调整因子 ξ̂
"""
from typing import Iterable, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .config import settings
from .sample_core import ArrayLike, BivariateSample, RankVectors
from .utils import logger, ConfigException, DegenerateXiException, SampleValidationException

# 秩阈值比较时的舍入容差（秩为整数）
_RANK_TOL = 1e-9


class EvtEstimates(BaseModel):
    """中间水平估计结果"""
    model_config = ConfigDict(frozen=True)

    gamma1_hat: Optional[float] = Field(default=None, description="γ₁ 的 Hill 估计", ge=0.0)
    eta_hat: Optional[float] = Field(default=None, description="η 的估计", gt=0.0)
    xi_hat: Optional[float] = Field(default=None, description="ξ_{1-k/n} 的估计", gt=0.0, lt=1.0)
    var_x_int: float = Field(..., description="X_{n-k,n}")
    var_y_int: float = Field(..., description="Y_{n-k,n}")


def _check_k(k: int, n: int, name: str = "k"):
    if not 1 <= k <= n - 1:
        raise ConfigException(f"{name}={k} 超出范围 [1, {n - 1}]", details={"parameter": name, "value": k, "n": n})


def hill_from_sorted(sorted_values: np.ndarray, k1: int) -> float:
    """对升序数组计算 Hill 估计"""
    n = sorted_values.shape[0]
    _check_k(k1, n, "k1")
    threshold = sorted_values[n - k1 - 1]
    if threshold <= 0:
        raise SampleValidationException(
            f"阈值次序统计量 X_(n-k1,n)={threshold} 非正，无法取对数",
            details={"k1": k1, "threshold": float(threshold)}
        )
    # 逐项对数超额非负，求和后仍非负
    excess = np.log(sorted_values[n - k1:]) - np.log(threshold)
    return float(np.sum(excess) / k1)


def hill(values: ArrayLike, k1: int) -> float:
    """
    Hill 估计量：前 k1 个次序统计量相对 X_{n-k1,n} 的对数超额均值

    Args:
        values: 正实数序列
        k1: 尾部样本数，1 <= k1 <= n-1

    Returns:
        float: γ̂₁ >= 0
    """
    arr = np.sort(np.asarray(values, dtype=np.float64).reshape(-1))
    return hill_from_sorted(arr, k1)


def hill_path(values: ArrayLike, k_values: Iterable[int]) -> List[Optional[float]]:
    """对一组 k1 计算 Hill 估计（Hill 图数据）；阈值非正处返回 None"""
    arr = np.sort(np.asarray(values, dtype=np.float64).reshape(-1))
    path = []
    for k1 in k_values:
        try:
            path.append(hill_from_sorted(arr, int(k1)))
        except SampleValidationException:
            path.append(None)
    return path


def min_rank_transform(ranks: RankVectors) -> np.ndarray:
    """T_i = (n+1)/(n+1-R_i^X) ∧ (n+1)/(n+1-R_i^Y)"""
    n = ranks.n
    tx = (n + 1) / (n + 1 - ranks.rx.astype(np.float64))
    ty = (n + 1) / (n + 1 - ranks.ry.astype(np.float64))
    return np.minimum(tx, ty)


def eta_regime_diagnostic(eta: float) -> Optional[str]:
    """η̂ 落在 (1/2, 1) 之外时返回诊断信息"""
    if settings.eta_regime_low < eta < settings.eta_regime_high:
        return None
    return (f"η̂={eta:.4f} 不在 ({settings.eta_regime_low}, {settings.eta_regime_high}) 内，"
            f"数据可能不满足尾部渐近独立且正相关的假设")


def eta_from_sorted_transform(t_sorted: np.ndarray, k2: int) -> float:
    """对升序 T 样本做 Hill 估计；结果必须为正"""
    eta = hill_from_sorted(t_sorted, k2)
    if eta <= 0:
        raise SampleValidationException("η̂ = 0，T 样本顶部取值全部相同", details={"k2": k2})
    return eta


def eta_hat(sample: BivariateSample, k2: int) -> float:
    """尾部相依系数 η 的估计：对 T 样本做 Hill 估计"""
    _check_k(k2, sample.n, "k2")
    eta = eta_from_sorted_transform(np.sort(min_rank_transform(sample.ranks)), k2)
    message = eta_regime_diagnostic(eta)
    if message:
        logger.warning(message)
    return eta


def eta_path(sample: BivariateSample, k_values: Iterable[int]) -> List[float]:
    """对一组 k2 计算 η̂（η 图数据）"""
    t_values = np.sort(min_rank_transform(sample.ranks))
    return [hill_from_sorted(t_values, int(k2)) for k2 in k_values]


def tail_copula_hat(sample: BivariateSample, k: int, x: float, y: float, eta_hat: float) -> float:
    """
    经验尾部 copula Ĉ_{n/k}(x, y)

    计数规则：R_i^X >= n - kx 且 R_i^Y >= n - ky（F̂_X(X_i) = R_i^X / n）
    """
    n = sample.n
    _check_k(k, n)
    if eta_hat <= 0:
        raise ConfigException(f"eta_hat={eta_hat} 必须为正", details={"eta_hat": eta_hat})
    if x < 0 or y < 0:
        raise ConfigException("x, y 必须非负", details={"x": x, "y": y})
    ranks = sample.ranks
    mask = (ranks.rx >= n - k * x - _RANK_TOL) & (ranks.ry >= n - k * y - _RANK_TOL)
    count = int(np.count_nonzero(mask))
    scale = np.exp(np.log(n / k) / eta_hat)
    return float(scale * count / n)


def xi_candidates(sample: BivariateSample, k: int) -> np.ndarray:
    """候选集 J 的整数分子 n - R_i^X（R_i^Y >= n-k），升序"""
    n = sample.n
    ranks = sample.ranks
    numerators = n - ranks.rx[ranks.ry >= n - k]
    return np.sort(numerators)


def xi_hat(sample: BivariateSample, k: int, eta_hat: float) -> float:
    """
    调整因子 ξ̂_{1-k/n} = inf{ξ ∈ (0,1): Ĉ_{n/k}(ξ,1) >= (k/n)^{2-1/η̂}}

    条件等价于 count(ξ) >= k²/n，因此 ξ̂ 为 J 中第 m = ceil(k²/n) 小的元素，
    η̂ 在该约化中完全抵消。

    Raises:
        DegenerateXiException: 第 m 个候选为 0、不少于 1 或 |J| < m
    """
    n = sample.n
    _check_k(k, n)
    if eta_hat <= 0:
        raise ConfigException(f"eta_hat={eta_hat} 必须为正", details={"eta_hat": eta_hat})
    m = -(-k * k // n)
    numerators = xi_candidates(sample, k)
    details = {"k": k, "n": n, "m": m, "candidates": int(numerators.shape[0])}
    advice = "请增大 k（理论要求 k 的阶高于 n^(2/3)）"
    if numerators.shape[0] < m:
        raise DegenerateXiException(f"候选集大小 {numerators.shape[0]} 小于 m={m}，{advice}", details=details)
    chosen = int(numerators[m - 1])
    if chosen == 0:
        raise DegenerateXiException(f"第 m={m} 个候选为 0，ξ̂ 退化，{advice}", details=details)
    if chosen >= k:
        raise DegenerateXiException(f"第 m={m} 个候选 {chosen / k:.4f} 不小于 1，{advice}", details=details)
    return chosen / k
