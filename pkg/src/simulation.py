"""
模拟模块
三种二元模型的采样器、CoVaR/CoES 真值（解析解与数值解）、蒙特卡洛真值校验、
MSRE 基准与 (k, k1) 网格搜索

随机数：numpy PCG64，第 r 次重复实验的流由 SeedSequence(entropy=seed, spawn_key=(r,)) 派生，
可单独复现
"""
import math
from typing import Any, Callable, Dict, Iterable, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import integrate, optimize

from .config import settings
from .covar_estimators import COVAR_IDS, ESTIMATOR_IDS, ExtrapolationSet, estimate_all
from .sample_core import BivariateSample, TailConfig
from .thread_pool_manager import ThreadPoolManager, thread_pool_manager
from .utils import (
    logger,
    handle_exception,
    ConfigException,
    EstimatorException,
    Gamma1OutOfRangeException,
    ModelSpecException,
    NoRootException,
)

SeedLike = Union[int, np.random.SeedSequence]
EstimatorFn = Callable[[BivariateSample, TailConfig], ExtrapolationSet]


class ModelSpec(BaseModel):
    """
    模拟模型参数

    marshall_olkin: Pareto(a) 边际 + Marshall-Olkin 生存 copula，参数 a, a1, a2
    pareto_mixture: (X,Y) = B(Z1,Z3) + (1-B)(Z2,Z2)，Z1,Z3 ~ Pareto(a)，Z2 ~ Pareto(b)
    """
    model_config = ConfigDict(frozen=True)

    variant: Literal["marshall_olkin", "pareto_mixture"] = Field(..., description="模型类型")
    a: float = Field(..., description="边际 Pareto 指数", gt=0.0)
    a1: Optional[float] = Field(default=None, description="Marshall-Olkin 参数 a1")
    a2: Optional[float] = Field(default=None, description="Marshall-Olkin 参数 a2")
    b: Optional[float] = Field(default=None, description="混合模型中 Z2 的 Pareto 指数")
    name: Optional[str] = Field(default=None, description="预设名称")

    @model_validator(mode="after")
    def _check(self):
        if self.variant == "marshall_olkin":
            for field in ("a1", "a2"):
                value = getattr(self, field)
                if value is None or not 0.0 < value < 1.0:
                    raise ModelSpecException(f"{field} 必须在 (0,1) 内", details={field: value})
        else:
            if self.b is None or not self.b > self.a:
                raise ModelSpecException("混合模型要求 b > a > 0", details={"a": self.a, "b": self.b})
        return self

    @classmethod
    def marshall_olkin(cls, a: float, a1: float, a2: float, name: Optional[str] = None) -> "ModelSpec":
        return cls(variant="marshall_olkin", a=a, a1=a1, a2=a2, name=name)

    @classmethod
    def pareto_mixture(cls, a: float, b: float, name: Optional[str] = None) -> "ModelSpec":
        return cls(variant="pareto_mixture", a=a, b=b, name=name)

    @property
    def gamma1(self) -> float:
        return 1.0 / self.a

    @property
    def eta(self) -> float:
        if self.variant == "marshall_olkin":
            return 1.0 / (2.0 - min(self.a1, self.a2))
        return self.a / self.b

    def describe(self) -> Dict[str, Any]:
        return self.model_dump(exclude_none=True)


class TruthValues(BaseModel):
    """模型真值"""
    model_config = ConfigDict(frozen=True)

    covar: float = Field(..., gt=0.0)
    coes: float = Field(...)
    gamma1: float = Field(..., gt=0.0, lt=1.0)
    eta: float = Field(..., gt=0.0, le=1.0)
    tau: float = Field(..., gt=0.0, lt=1.0)

    def for_estimator(self, estimator: str) -> float:
        return self.covar if estimator in COVAR_IDS else self.coes


class MonteCarloTruth(BaseModel):
    """蒙特卡洛真值校验结果"""
    tau: float
    covar: float
    var_y: float
    n_draws: int
    joint_count: int
    joint_prob: float = Field(..., description="P̂(X >= CoVaR, Y >= VaR_Y)")
    joint_prob_se: float
    target_prob: float = Field(..., description="(1-τ)²")
    cond_mean: Optional[float] = Field(default=None, description="联合尾部上 X 的条件均值")
    cond_mean_se: Optional[float] = None


class MsreReport(BaseModel):
    """单个估计量的 MSRE 报告"""
    estimator: str
    replications: int = Field(..., ge=1)
    successful: int
    msre: Optional[float] = Field(default=None, ge=0.0)
    truth: float
    ratios: List[Optional[float]] = Field(default_factory=list, description="逐次 估计/真值，失败为 None")
    failures: Dict[int, Dict[str, Any]] = Field(default_factory=dict, description="失败的重复实验")
    config: Dict[str, Any] = Field(default_factory=dict)

    def valid_ratios(self) -> np.ndarray:
        return np.array([r for r in self.ratios if r is not None], dtype=np.float64)

    def iqr(self) -> Optional[float]:
        """比值的四分位距"""
        ratios = self.valid_ratios()
        if ratios.shape[0] == 0:
            return None
        q75, q25 = np.percentile(ratios, [75, 25])
        return float(q75 - q25)


class GridCell(BaseModel):
    """网格搜索单元"""
    k: int
    k1: int
    msre: Optional[float] = None
    successful: int = 0
    excluded: Optional[str] = Field(default=None, description="被排除的原因")


class GridSearchResult(BaseModel):
    """网格搜索结果"""
    estimator: str
    best_k: Optional[int] = None
    best_k1: Optional[int] = None
    best_msre: Optional[float] = None
    surface: List[GridCell] = Field(default_factory=list)


# ---------------------------------------------------------------------------
# 模型分布
# ---------------------------------------------------------------------------

def replication_seed(seed: int, replication: int) -> np.random.SeedSequence:
    """第 r 次重复实验的独立随机流"""
    return np.random.SeedSequence(entropy=seed, spawn_key=(replication,))


def _generator(seed: SeedLike) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _pareto(rng: np.random.Generator, index: float, size: int) -> np.ndarray:
    """Pareto(index)，支撑 [1, ∞)"""
    return (1.0 - rng.random(size)) ** (-1.0 / index)


def _draw(spec: ModelSpec, rng: np.random.Generator, size: int):
    if spec.variant == "marshall_olkin":
        # 三个指数冲击：E1 ~ Exp(1/a1 - 1)，E2 ~ Exp(1/a2 - 1)，E12 ~ Exp(1)
        e1 = rng.exponential(1.0 / (1.0 / spec.a1 - 1.0), size)
        e2 = rng.exponential(1.0 / (1.0 / spec.a2 - 1.0), size)
        e12 = rng.exponential(1.0, size)
        t1 = np.minimum(e1, e12)
        t2 = np.minimum(e2, e12)
        # U = exp(-T1/a1)，X = U^(-1/a)
        return np.exp(t1 / (spec.a1 * spec.a)), np.exp(t2 / (spec.a2 * spec.a))
    bern = rng.random(size) < 0.5
    z1 = _pareto(rng, spec.a, size)
    z2 = _pareto(rng, spec.b, size)
    z3 = _pareto(rng, spec.a, size)
    return np.where(bern, z1, z2), np.where(bern, z3, z2)


def sample_model(spec: ModelSpec, n: int, seed: SeedLike) -> BivariateSample:
    """
    从模型抽取 n 对样本

    Args:
        spec: 模型参数
        n: 样本量
        seed: 整数种子或 SeedSequence

    Returns:
        BivariateSample
    """
    if n < 1:
        raise ConfigException(f"n={n} 必须为正", details={"n": n})
    x, y = _draw(spec, _generator(seed), n)
    return BivariateSample(x=x, y=y)


def marginal_survival(spec: ModelSpec, x: float) -> float:
    """P(X >= x)，X 与 Y 边际相同"""
    x = max(x, 1.0)
    if spec.variant == "marshall_olkin":
        return x ** (-spec.a)
    return 0.5 * x ** (-spec.a) + 0.5 * x ** (-spec.b)


def survival_copula_mo(u: float, v: float, a1: float, a2: float) -> float:
    """Marshall-Olkin 生存 copula uv·min(u^{-a1}, v^{-a2})"""
    return u * v * min(u ** (-a1), v ** (-a2))


def joint_survival(spec: ModelSpec, x: float, y: float) -> float:
    """P(X >= x, Y >= y)"""
    x = max(x, 1.0)
    y = max(y, 1.0)
    if spec.variant == "marshall_olkin":
        return survival_copula_mo(x ** (-spec.a), y ** (-spec.a), spec.a1, spec.a2)
    return 0.5 * x ** (-spec.a) * y ** (-spec.a) + 0.5 * max(x, y) ** (-spec.b)


def tail_copula_limit(spec: ModelSpec, x: float, y: float) -> float:
    """尾部 copula 极限 C(x, y)"""
    if spec.variant == "marshall_olkin":
        a1, a2 = spec.a1, spec.a2
        if a1 < a2:
            return x ** (1.0 - a1) * y
        if a1 == a2:
            return x * y * max(x, y) ** (-a1)
        return x * y ** (1.0 - a2)
    ratio = spec.b / spec.a
    return 2.0 ** (ratio - 1.0) * min(x, y) ** ratio


# ---------------------------------------------------------------------------
# 真值
# ---------------------------------------------------------------------------

def _check_tau(tau: float):
    if not 0.0 < tau < 1.0:
        raise ConfigException(f"tau={tau} 必须在 (0,1) 内", details={"tau": tau})


def _decreasing_root(func: Callable[[float], float], target: float, label: str) -> float:
    """
    在 [1, ∞) 上求单调递减函数 func(c) = target 的根

    从 [1, 2] 开始倍增扩展区间，再用二分法求解
    """
    lo, hi = 1.0, 2.0
    if func(lo) < target:
        raise NoRootException(f"{label}: 在支撑下端函数值已低于目标", details={"target": target})
    if func(lo) == target:
        return lo
    for _ in range(settings.root_max_doublings):
        if func(hi) < target:
            break
        lo, hi = hi, hi * 2.0
    else:
        raise NoRootException(f"{label}: 区间扩展失败", details={"target": target, "upper": hi})
    return float(optimize.bisect(
        lambda c: func(c) - target, lo, hi,
        xtol=1e-300, rtol=settings.root_rtol, maxiter=2000
    ))


def true_var_y(spec: ModelSpec, tau: float) -> float:
    """Y 的 VaR：P(Y >= q) = 1-τ"""
    _check_tau(tau)
    p = 1.0 - tau
    if spec.variant == "marshall_olkin":
        return p ** (-1.0 / spec.a)
    return _decreasing_root(lambda q: marginal_survival(spec, q), p, "VaR_Y")


def _covar_analytic_mo(spec: ModelSpec, tau: float) -> float:
    """Marshall-Olkin 模型的解析解：按 min 分支求 u"""
    p = 1.0 - tau
    a1, a2 = spec.a1, spec.a2
    if a2 <= a1 * (1.0 + a2):
        # min 取 v^{-a2}：u p^{1-a2} = p²
        log_u = (1.0 + a2) * math.log(p)
    else:
        # min 取 u^{-a1}：u^{1-a1} p = p²
        log_u = math.log(p) / (1.0 - a1)
    return math.exp(-log_u / spec.a)


def _mo_tail_integral(spec: ModelSpec, tau: float) -> float:
    """
    ∫_1^∞ S(ct, q)/S(c, q) dt 的闭式解，c 为 CoVaR 真值

    min 取 v^{-a2} 时比值为 t^{-a}；否则先按 t^{-a(1-a1)} 衰减，
    越过分段点 t* 后转为 t^{-a}
    """
    a, a1, a2 = spec.a, spec.a1, spec.a2
    if a2 <= a1 * (1.0 + a2):
        return 1.0 / (a - 1.0)
    log_p = math.log(1.0 - tau)
    beta = a * (1.0 - a1)
    # u(c) = p^{1/(1-a1)}，分段点 u* = p^{a2/a1}
    log_t_star = (log_p / (1.0 - a1) - a2 / a1 * log_p) / a
    if abs(beta - 1.0) < 1e-12:
        head = log_t_star
    else:
        head = -math.expm1((1.0 - beta) * log_t_star) / (beta - 1.0)
    return head + math.exp((1.0 - beta) * log_t_star) / (a - 1.0)


@handle_exception
def true_covar(spec: ModelSpec, tau: float, method: str = "auto") -> float:
    """
    CoVaR 真值：P(X >= c, Y >= VaR_Y(τ)) = (1-τ)²

    Args:
        method: auto（Marshall-Olkin 用解析解，混合模型用二分法）、analytic、numeric
    """
    _check_tau(tau)
    if method not in ("auto", "analytic", "numeric"):
        raise ConfigException(f"未知的求解方法: {method}", details={"method": method})
    if method == "analytic" and spec.variant != "marshall_olkin":
        raise ModelSpecException("混合模型没有 CoVaR 解析解", details={"variant": spec.variant})
    if spec.variant == "marshall_olkin" and method != "numeric":
        return _covar_analytic_mo(spec, tau)
    q = true_var_y(spec, tau)
    return _decreasing_root(lambda c: joint_survival(spec, c, q), (1.0 - tau) ** 2, "CoVaR")


@handle_exception
def true_coes(spec: ModelSpec, tau: float, method: str = "auto") -> float:
    """
    CoES 真值：E[X | X >= CoVaR(τ), Y >= VaR_Y(τ)]

    数值解为 c + c∫_1^∞ S(ct, q)/S(c, q) dt；Marshall-Olkin 的解析解利用联合尾部
    在 CoVaR 之上为分段 Pareto 型

    Args:
        method: auto / numeric（数值积分）、analytic（仅 Marshall-Olkin）
    """
    if spec.gamma1 >= 1.0:
        raise Gamma1OutOfRangeException("γ₁ = 1/a >= 1，CoES 不存在", details={"a": spec.a})
    covar = true_covar(spec, tau, method="numeric" if method == "numeric" else "auto")
    if method == "analytic":
        if spec.variant != "marshall_olkin":
            raise ModelSpecException("混合模型没有 CoES 解析解", details={"variant": spec.variant})
        return covar * (1.0 + _mo_tail_integral(spec, tau))
    q = true_var_y(spec, tau)
    base = joint_survival(spec, covar, q)
    integral, _ = integrate.quad(
        lambda t: joint_survival(spec, covar * t, q) / base,
        1.0, np.inf,
        epsabs=0.0, epsrel=settings.quad_epsrel, limit=settings.quad_limit
    )
    return covar + covar * integral


def true_values(spec: ModelSpec, tau: float) -> TruthValues:
    """CoVaR/CoES 真值与模型的 γ₁、η"""
    return TruthValues(
        covar=true_covar(spec, tau),
        coes=true_coes(spec, tau),
        gamma1=spec.gamma1,
        eta=spec.eta,
        tau=tau
    )


def monte_carlo_truth(spec: ModelSpec, tau: float, n_draws: int = 10_000_000,
                      seed: SeedLike = 0, chunk_size: Optional[int] = None) -> MonteCarloTruth:
    """
    蒙特卡洛校验：在真值 CoVaR 处估计联合超越概率与条件均值

    分块抽样以控制内存
    """
    covar = true_covar(spec, tau)
    q = true_var_y(spec, tau)
    rng = _generator(seed)
    chunk = chunk_size or settings.mc_chunk_size
    count, total, total_sq, drawn = 0, 0.0, 0.0, 0
    while drawn < n_draws:
        size = min(chunk, n_draws - drawn)
        x, y = _draw(spec, rng, size)
        hit = x[(x >= covar) & (y >= q)]
        count += int(hit.shape[0])
        total += float(np.sum(hit))
        total_sq += float(np.sum(hit * hit))
        drawn += size
    prob = count / n_draws
    cond_mean, cond_se = None, None
    if count >= 2:
        cond_mean = total / count
        variance = max(total_sq / count - cond_mean ** 2, 0.0) * count / (count - 1)
        cond_se = math.sqrt(variance / count)
    return MonteCarloTruth(
        tau=tau, covar=covar, var_y=q, n_draws=n_draws, joint_count=count,
        joint_prob=prob, joint_prob_se=math.sqrt(prob * (1.0 - prob) / n_draws),
        target_prob=(1.0 - tau) ** 2, cond_mean=cond_mean, cond_mean_se=cond_se
    )


# ---------------------------------------------------------------------------
# MSRE 基准与网格搜索
# ---------------------------------------------------------------------------

def _default_estimator(sample: BivariateSample, config: TailConfig) -> ExtrapolationSet:
    return estimate_all(sample, config)[2]


def run_msre(spec: ModelSpec, n: int, tau_prime: float, config: TailConfig, N: int, seed: int,
             estimator_fn: Optional[EstimatorFn] = None,
             workers: Optional[int] = None,
             truth: Optional[TruthValues] = None,
             pool: Optional[ThreadPoolManager] = None) -> Dict[str, MsreReport]:
    """
    MSRE = (1/N) Σ (θ̂⁽ⁱ⁾/θ - 1)²，逐估计量报告

    Args:
        spec: 模型
        n: 每次重复实验的样本量
        tau_prime: 极端水平（覆盖 config.tau_prime）
        config: 尾部超参数
        N: 重复次数
        seed: 基础种子
        estimator_fn: 估计函数，默认 estimate_all
        workers: 并行线程数
        truth: 预先计算的真值

    Returns:
        Dict[str, MsreReport]: 估计量编号 -> 报告
    """
    if N < 1:
        raise ConfigException(f"重复次数 N={N} 必须 >= 1", details={"N": N})
    config = config.model_copy(update={"tau_prime": tau_prime})
    config.validate_for(n)
    truth = truth or true_values(spec, tau_prime)
    estimator_fn = estimator_fn or _default_estimator
    pool = pool or thread_pool_manager

    def replicate(task: Dict[str, Any]) -> ExtrapolationSet:
        sample = sample_model(spec, n, replication_seed(seed, task["replication"]))
        return estimator_fn(sample, config)

    tasks = [{"task_id": f"rep_{r}", "replication": r} for r in range(N)]
    logger.info(f"开始 MSRE 实验: n={n}, τ′={tau_prime}, k={config.k}, k1={config.k1}, k2={config.k2}, N={N}")
    outcomes = pool.execute_tasks_parallel(tasks, replicate, max_workers=workers)

    echo = {
        "model": spec.describe(), "n": n, "tau_prime": tau_prime,
        "k": config.k, "k1": config.k1, "k2": config.k2, "seed": seed, "N": N
    }
    reports = {}
    for estimator in ESTIMATOR_IDS:
        target = truth.for_estimator(estimator)
        ratios: List[Optional[float]] = []
        failures: Dict[int, Dict[str, Any]] = {}
        for r, outcome in enumerate(outcomes):
            if not outcome["success"]:
                failures[r] = outcome["error"]
                ratios.append(None)
                continue
            result: ExtrapolationSet = outcome["result"]
            value = result.estimates()[estimator]
            if value is None:
                failures[r] = result.errors.get(estimator, {"error_code": "MISSING_INPUT"})
                ratios.append(None)
            else:
                ratios.append(value / target)
        valid = np.array([v for v in ratios if v is not None], dtype=np.float64)
        msre = float(np.mean((valid - 1.0) ** 2)) if valid.shape[0] else None
        if failures:
            logger.warning(f"{estimator}: {len(failures)}/{N} 次重复实验失败")
        reports[estimator] = MsreReport(
            estimator=estimator, replications=N, successful=int(valid.shape[0]), msre=msre,
            truth=target, ratios=ratios, failures=failures, config=echo
        )
    return reports


def grid_search(spec: ModelSpec, n: int, tau_prime: float,
                k_grid: Iterable[int], k1_grid: Iterable[int], N: int, seed: int,
                estimator: str = "covar_i",
                estimator_fn: Optional[EstimatorFn] = None,
                workers: Optional[int] = None) -> GridSearchResult:
    """
    在 (k, k1) 网格上穷举 MSRE（k2 = k1），选择最小者

    各单元使用相同的重复实验种子；并列时取字典序最小的 (k, k1)
    """
    k_values = sorted(set(int(k) for k in k_grid))
    k1_values = sorted(set(int(k1) for k1 in k1_grid))
    if not k_values or not k1_values:
        raise ConfigException("网格不能为空")
    if estimator not in ESTIMATOR_IDS:
        raise ConfigException(f"未知的估计量: {estimator}", details={"estimator": estimator})

    truth = true_values(spec, tau_prime)
    cells: List[GridCell] = []
    for k in k_values:
        for k1 in k1_values:
            try:
                config = TailConfig(k=k, k1=k1, k2=k1, tau_prime=tau_prime).validate_for(n)
            except EstimatorException as e:
                cells.append(GridCell(k=k, k1=k1, excluded=e.error_code))
                continue
            except ValueError:
                cells.append(GridCell(k=k, k1=k1, excluded="INVALID_CONFIG"))
                continue
            report = run_msre(spec, n, tau_prime, config, N, seed,
                              estimator_fn=estimator_fn, workers=workers, truth=truth)[estimator]
            if report.successful == 0:
                logger.warning(f"网格单元 (k={k}, k1={k1}) 全部失败，已排除")
                cells.append(GridCell(k=k, k1=k1, excluded="ALL_REPLICATIONS_FAILED"))
            else:
                cells.append(GridCell(k=k, k1=k1, msre=report.msre, successful=report.successful))

    result = GridSearchResult(estimator=estimator, surface=cells)
    candidates = [c for c in cells if c.excluded is None]
    if candidates:
        best = min(candidates, key=lambda c: (c.msre, c.k, c.k1))
        result.best_k, result.best_k1, result.best_msre = best.k, best.k1, best.msre
    return result
