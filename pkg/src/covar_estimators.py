"""
CoVaR / CoES 估计模块
中间水平 CoVaR/CoES 估计以及五种极端水平外推：
CoVaR-I、CoVaR-II、CoES-I、CoES-II、CoES-III
"""
import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field

from .evt_estimators import (
    EvtEstimates,
    eta_from_sorted_transform,
    eta_regime_diagnostic,
    hill_from_sorted,
    min_rank_transform,
    xi_hat,
)
from .sample_core import BivariateSample, TailConfig, sorted_order_statistic
from .utils import (
    logger,
    ConfigException,
    EstimatorException,
    Gamma1OutOfRangeException,
    InsufficientJointTailException,
    MissingInputException,
)

ESTIMATOR_IDS = ("covar_i", "covar_ii", "coes_i", "coes_ii", "coes_iii")
COVAR_IDS = ("covar_i", "covar_ii")


class IntermediateEstimates(BaseModel):
    """中间水平 1-k/n 的 CoVaR / CoES 估计"""
    model_config = ConfigDict(frozen=True)

    covar_int: Optional[float] = Field(default=None, description="CoVaR(1-k/n) 的估计")
    coes_int: Optional[float] = Field(default=None, description="CoES(1-k/n) 的估计")
    threshold_count: int = Field(..., description="m = ceil(k²/n)", ge=1)


class ExtrapolationInputs(BaseModel):
    """外推所需的全部输入"""
    model_config = ConfigDict(frozen=True)

    gamma1_hat: float = Field(..., description="γ̂₁", ge=0.0)
    eta_hat: float = Field(..., description="η̂", gt=0.0)
    xi_hat: Optional[float] = Field(default=None, description="ξ̂_{1-k/n}")
    var_x_int: float = Field(..., description="X_{n-k,n}")
    covar_int: Optional[float] = Field(default=None, description="中间水平 CoVaR 估计")
    coes_int: Optional[float] = Field(default=None, description="中间水平 CoES 估计")
    k: int = Field(..., ge=1)
    n: int = Field(..., ge=2)
    tau_prime: float = Field(..., gt=0.0, lt=1.0)

    @computed_field
    @property
    def dn(self) -> float:
        """外推比 d_n = k / (n(1-τ′))"""
        return self.k / (self.n * (1.0 - self.tau_prime))

    @computed_field
    @property
    def exponent(self) -> float:
        """外推指数 γ̂₁(3 - 1/η̂)"""
        return self.gamma1_hat * (3.0 - 1.0 / self.eta_hat)

    def log_scale(self) -> float:
        """log(d_n^{γ̂₁(3-1/η̂)})"""
        return self.exponent * math.log(self.dn)


class ExtrapolationSet(BaseModel):
    """五种极端水平外推结果，每个估计量独立成败"""

    covar_i: Optional[float] = Field(default=None, description="CoVaR-I")
    covar_ii: Optional[float] = Field(default=None, description="CoVaR-II")
    coes_i: Optional[float] = Field(default=None, description="CoES-I")
    coes_ii: Optional[float] = Field(default=None, description="CoES-II")
    coes_iii: Optional[float] = Field(default=None, description="CoES-III")
    diagnostics: List[str] = Field(default_factory=list, description="诊断告警")
    errors: Dict[str, Dict[str, Any]] = Field(default_factory=dict, description="各估计量的错误")

    def estimates(self) -> Dict[str, Optional[float]]:
        """按估计量编号返回数值"""
        return {name: getattr(self, name) for name in ESTIMATOR_IDS}


def _conditioning_threshold(sample: BivariateSample, k: int) -> float:
    """Y_{n-k,n}"""
    n = sample.n
    if not 1 <= k <= n - 1:
        raise ConfigException(f"k={k} 超出范围 [1, {n - 1}]", details={"k": k, "n": n})
    return sorted_order_statistic(sample.sorted_y, n - k)


def intermediate_covar(sample: BivariateSample, k: int) -> float:
    """
    中间水平 CoVaR：sup{s: P_n(s) >= (k/n)²}

    P_n(s) = (1/n) Σ I(X_i >= s, Y_i >= Y_{n-k,n})，上确界为条件集 S 中第 m 大的 X，
    m = ceil(k²/n)

    Raises:
        InsufficientJointTailException: |S| < m
    """
    n = sample.n
    y_threshold = _conditioning_threshold(sample, k)
    xs = np.sort(sample.x[sample.y >= y_threshold])
    m = -(-k * k // n)
    if xs.shape[0] < m:
        raise InsufficientJointTailException(
            f"条件集大小 {xs.shape[0]} 小于 m={m}",
            details={"k": k, "n": n, "m": m, "conditioning_size": int(xs.shape[0])}
        )
    return float(xs[xs.shape[0] - m])


def intermediate_coes(sample: BivariateSample, k: int, covar_int: float) -> float:
    """中间水平 CoES：(n/k²) Σ X_i I(X_i >= CoVaR, Y_i >= Y_{n-k,n})"""
    n = sample.n
    y_threshold = _conditioning_threshold(sample, k)
    mask = (sample.x >= covar_int) & (sample.y >= y_threshold)
    if not np.any(mask):
        raise InsufficientJointTailException(
            "联合尾部集合为空",
            details={"k": k, "n": n, "covar_int": covar_int}
        )
    return float(n / (k * k) * np.sum(sample.x[mask]))


def _require(value: Optional[float], name: str) -> float:
    if value is None:
        raise MissingInputException(f"外推缺少输入 {name}", details={"input": name})
    return value


def covar_extrap_I(inputs: ExtrapolationInputs) -> float:
    """CoVaR-I = d_n^{γ̂₁(3-1/η̂)} · ξ̂^{-γ̂₁} · X_{n-k,n}"""
    xi = _require(inputs.xi_hat, "xi_hat")
    if not 0.0 < xi <= 1.0:
        raise ConfigException(f"xi_hat={xi} 必须在 (0,1] 内", details={"xi_hat": xi})
    return math.exp(inputs.log_scale() - inputs.gamma1_hat * math.log(xi)) * inputs.var_x_int


def coes_extrap_I(inputs: ExtrapolationInputs, covar_i: float) -> float:
    """CoES-I = CoVaR-I / (1 - γ̂₁)"""
    return _coes_from_covar(inputs, covar_i)


def covar_extrap_II(inputs: ExtrapolationInputs) -> float:
    """CoVaR-II = d_n^{γ̂₁(3-1/η̂)} · CoVaR(1-k/n)"""
    covar_int = _require(inputs.covar_int, "covar_int")
    return math.exp(inputs.log_scale()) * covar_int


def coes_extrap_II(inputs: ExtrapolationInputs, covar_ii: float) -> float:
    """CoES-II = CoVaR-II / (1 - γ̂₁)"""
    return _coes_from_covar(inputs, covar_ii)


def coes_iii_diagnostic(inputs: ExtrapolationInputs) -> Optional[str]:
    """γ̂₁ >= (3-1/η̂)/4 时 CoES-III 超出理论适用范围"""
    bound = (3.0 - 1.0 / inputs.eta_hat) / 4.0
    if inputs.gamma1_hat >= bound:
        return f"γ̂₁={inputs.gamma1_hat:.4f} >= (3-1/η̂)/4={bound:.4f}，CoES-III 超出理论适用范围"
    return None


def coes_extrap_III(inputs: ExtrapolationInputs) -> float:
    """CoES-III = d_n^{γ̂₁(3-1/η̂)} · CoES(1-k/n)"""
    coes_int = _require(inputs.coes_int, "coes_int")
    message = coes_iii_diagnostic(inputs)
    if message:
        logger.warning(message)
    return math.exp(inputs.log_scale()) * coes_int


def _coes_from_covar(inputs: ExtrapolationInputs, covar: float) -> float:
    if inputs.gamma1_hat >= 1.0:
        raise Gamma1OutOfRangeException(
            f"γ̂₁={inputs.gamma1_hat:.4f} >= 1，CoES 不存在",
            details={"gamma1_hat": inputs.gamma1_hat}
        )
    return covar / (1.0 - inputs.gamma1_hat)


class _Collector:
    """逐个估计量收集结果与错误"""

    def __init__(self):
        self.errors: Dict[str, Dict[str, Any]] = {}
        self.diagnostics: List[str] = []

    def run(self, name: str, func, *args, upstream: Tuple[str, ...] = ()):
        for dep in upstream:
            if dep in self.errors:
                self.errors[name] = self.errors[dep]
                return None
        try:
            return func(*args)
        except EstimatorException as e:
            logger.debug(f"估计量 {name} 失败: {e.message}")
            self.errors[name] = e.to_dict()
            return None

    def note(self, message: Optional[str]):
        if message and message not in self.diagnostics:
            logger.warning(message)
            self.diagnostics.append(message)


def estimate_all(sample: BivariateSample,
                 config: TailConfig) -> Tuple[EvtEstimates, IntermediateEstimates, ExtrapolationSet]:
    """
    完整估计流程：秩 → γ̂₁ → η̂ → ξ̂ → 中间 CoVaR/CoES → 五种外推

    单个估计量失败时记录错误并继续，其余结果照常返回

    Args:
        sample: 二元样本
        config: 尾部超参数

    Returns:
        (EvtEstimates, IntermediateEstimates, ExtrapolationSet)
    """
    n = sample.n
    config.validate_for(n)
    k = config.k
    c = _Collector()
    if config.low_threshold_warning(n):
        c.note(f"k²/n = {k * k / n:.4f} 过小，ξ̂ 可能退化，建议增大 k")

    var_x_int = sorted_order_statistic(sample.sorted_x, n - k)
    var_y_int = sorted_order_statistic(sample.sorted_y, n - k)

    gamma1 = c.run("gamma1_hat", hill_from_sorted, sample.sorted_x, config.k1)
    t_sorted = np.sort(min_rank_transform(sample.ranks))
    eta = c.run("eta_hat", eta_from_sorted_transform, t_sorted, config.k2)
    if eta is not None:
        c.note(eta_regime_diagnostic(eta))
    xi = c.run("xi_hat", xi_hat, sample, k, eta, upstream=("eta_hat",))

    covar_int = c.run("covar_int", intermediate_covar, sample, k)
    coes_int = c.run("coes_int", intermediate_coes, sample, k, covar_int, upstream=("covar_int",))

    evt = EvtEstimates(gamma1_hat=gamma1, eta_hat=eta, xi_hat=xi, var_x_int=var_x_int, var_y_int=var_y_int)
    intermediate = IntermediateEstimates(
        covar_int=covar_int,
        coes_int=coes_int,
        threshold_count=config.threshold_count(n)
    )

    values: Dict[str, Optional[float]] = {}
    if gamma1 is not None and eta is not None:
        inputs = ExtrapolationInputs(
            gamma1_hat=gamma1, eta_hat=eta, xi_hat=xi, var_x_int=var_x_int,
            covar_int=covar_int, coes_int=coes_int, k=k, n=n, tau_prime=config.tau_prime
        )
        values["covar_i"] = c.run("covar_i", covar_extrap_I, inputs, upstream=("xi_hat",))
        values["covar_ii"] = c.run("covar_ii", covar_extrap_II, inputs, upstream=("covar_int",))
        values["coes_i"] = c.run("coes_i", coes_extrap_I, inputs, values["covar_i"], upstream=("covar_i",))
        values["coes_ii"] = c.run("coes_ii", coes_extrap_II, inputs, values["covar_ii"], upstream=("covar_ii",))
        c.note(coes_iii_diagnostic(inputs))
        values["coes_iii"] = c.run("coes_iii", coes_extrap_III, inputs, upstream=("coes_int",))
    else:
        missing = "gamma1_hat" if gamma1 is None else "eta_hat"
        for name in ESTIMATOR_IDS:
            c.errors[name] = c.errors[missing]

    extrapolations = ExtrapolationSet(**values, diagnostics=c.diagnostics, errors=c.errors)
    return evt, intermediate, extrapolations
