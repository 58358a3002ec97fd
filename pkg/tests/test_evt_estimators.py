"""
极值估计量测试用例
"""
import logging
import math

import numpy as np
import pytest

from src.evt_estimators import (
    eta_hat,
    eta_path,
    eta_regime_diagnostic,
    hill,
    hill_path,
    min_rank_transform,
    tail_copula_hat,
    xi_candidates,
    xi_hat,
)
from src.sample_core import BivariateSample, RankVectors
from src.simulation import sample_model
from src.utils import ConfigException, DegenerateXiException, SampleValidationException


def _brute_force_xi(sample: BivariateSample, k: int, eta: float):
    """字面定义：在候选集 J 上按升序扫描第一个满足条件的 ξ"""
    n = sample.n
    target = (k / n) ** (2.0 - 1.0 / eta)
    for numerator in np.unique(xi_candidates(sample, k)):
        xi = numerator / k
        if tail_copula_hat(sample, k, xi, 1.0, eta) >= target * (1.0 - 1e-12):
            return xi
    return None


class TestHill:
    """Hill 估计量测试"""

    def test_constant_values(self):
        """测试常数样本"""
        assert hill([2.0] * 10, 3) == 0.0

    def test_hand_example(self):
        """测试手算示例"""
        assert hill([1, 2, 4, 8], 2) == pytest.approx(1.039721, abs=1e-6)

    def test_scale_invariance(self):
        """测试尺度不变性"""
        rng = np.random.default_rng(11)
        values = (1.0 - rng.random(500)) ** (-0.5)
        for c in (0.01, 3.0, 1e6):
            assert hill(c * values, 50) == pytest.approx(hill(values, 50), rel=1e-12, abs=1e-15)

    def test_non_negative(self):
        """测试结果非负"""
        rng = np.random.default_rng(12)
        for _ in range(20):
            values = rng.lognormal(size=100)
            assert hill(values, int(rng.integers(1, 99))) >= 0.0

    def test_non_positive_threshold(self):
        """测试阈值非正"""
        with pytest.raises(SampleValidationException):
            hill([-1.0, -2.0, 3.0, 4.0], 2)

    def test_k_out_of_range(self):
        """测试 k1 越界"""
        with pytest.raises(ConfigException):
            hill([1, 2, 3, 4], 4)
        with pytest.raises(ConfigException):
            hill([1, 2, 3, 4], 0)

    def test_hill_path(self):
        """测试 Hill 路径"""
        path = hill_path([-3.0, -1.0, 2.0, 4.0, 8.0], [1, 2, 3])
        assert path[0] == pytest.approx(math.log(2.0))
        assert path[1] == pytest.approx(0.5 * (math.log(4.0) - math.log(2.0)) + 0.5 * (math.log(8.0) - math.log(2.0)))
        assert path[2] is None

    @pytest.mark.slow
    def test_pareto_index(self):
        """测试 Pareto(3) 的极值指数"""
        rng = np.random.default_rng(13)
        values = (1.0 - rng.random(100_000)) ** (-1.0 / 3.0)
        assert hill(values, 2000) == pytest.approx(1.0 / 3.0, abs=0.05)


class TestMinRankTransform:
    """T 变换测试"""

    def test_comonotone(self):
        """测试同单调情形"""
        ranks = RankVectors(rx=np.arange(1, 6), ry=np.arange(1, 6))
        assert min_rank_transform(ranks).tolist() == pytest.approx([1.2, 1.5, 2.0, 3.0, 6.0])

    def test_crossed_ranks(self):
        """测试交叉秩"""
        ranks = RankVectors(rx=np.array([1, 2]), ry=np.array([2, 1]))
        assert min_rank_transform(ranks).tolist() == [1.5, 1.5]

    def test_range(self):
        """测试取值范围"""
        rng = np.random.default_rng(14)
        n = 60
        ranks = RankVectors(rx=rng.permutation(n) + 1, ry=rng.permutation(n) + 1)
        t = min_rank_transform(ranks)
        assert np.all(t >= (n + 1) / n)
        assert np.all(t <= n + 1)


class TestEtaHat:
    """尾部相依系数估计测试"""

    def test_hand_example(self):
        """测试手算示例"""
        sample = BivariateSample(x=[1, 2, 3, 4, 5], y=[1, 2, 3, 4, 5])
        assert eta_hat(sample, 2) == pytest.approx(0.752039, abs=1e-6)

    def test_monotone_invariance(self):
        """测试边际严格增变换不变性"""
        rng = np.random.default_rng(15)
        x = rng.random(300) + 0.5
        y = x + rng.random(300)
        base = eta_hat(BivariateSample(x=x, y=y), 40)
        moved = eta_hat(BivariateSample(x=np.exp(x), y=y ** 5), 40)
        assert base == moved

    def test_k2_out_of_range(self):
        """测试 k2 越界"""
        sample = BivariateSample(x=[1, 2, 3, 4], y=[1, 2, 3, 4])
        with pytest.raises(ConfigException):
            eta_hat(sample, 4)

    def test_regime_diagnostic(self, caplog):
        """测试 η̂ 落在 (1/2, 1) 之外时给出诊断并告警"""
        n = 100
        sample = BivariateSample(x=np.arange(1, n + 1), y=np.arange(n, 0, -1))
        with caplog.at_level(logging.WARNING, logger="covar_extrapolator"):
            eta = eta_hat(sample, 10)
        # 反序样本 T 的顶部取值成对出现：(1/5) Σ_{d=51..55} log(56/d)
        expected = sum(math.log(56.0 / d) for d in range(51, 56)) / 5.0
        assert eta == pytest.approx(expected, rel=1e-12)
        message = eta_regime_diagnostic(eta)
        assert message is not None and "η̂=" in message
        assert any(r.levelno == logging.WARNING and r.getMessage() == message for r in caplog.records)
        assert eta_regime_diagnostic(0.75) is None
        assert eta_regime_diagnostic(1.0) is not None

    def test_eta_path(self):
        """测试 η 路径"""
        sample = BivariateSample(x=[1, 2, 3, 4, 5], y=[1, 2, 3, 4, 5])
        path = eta_path(sample, [2, 3])
        assert path[0] == pytest.approx(eta_hat(sample, 2))
        assert len(path) == 2

    @pytest.mark.slow
    def test_independent_pairs(self):
        """测试独立样本 η = 1/2"""
        rng = np.random.default_rng(16)
        sample = BivariateSample(x=rng.random(100_000), y=rng.random(100_000))
        assert eta_hat(sample, 2000) == pytest.approx(0.5, abs=0.07)

    @pytest.mark.slow
    def test_model2(self, model2):
        """测试模型 2 的 η = 10/13"""
        sample = sample_model(model2, 100_000, 17)
        assert eta_hat(sample, 2000) == pytest.approx(10.0 / 13.0, abs=0.07)


class TestTailCopulaHat:
    """经验尾部 copula 测试"""

    @pytest.fixture
    def sample(self):
        # 秩 {(1,1),(2,3),(3,2),(4,5),(5,4)}
        return BivariateSample(x=[1, 2, 3, 4, 5], y=[1, 3, 2, 5, 4])

    def test_hand_example(self, sample):
        """测试手算示例"""
        value = tail_copula_hat(sample, 2, 1.0, 1.0, 0.75)
        assert value == pytest.approx(2.5 ** (4.0 / 3.0) * 0.4, rel=1e-12)
        assert value == pytest.approx(1.357209, abs=1e-6)

    def test_all_indicators(self, sample):
        """测试 x = y = n/k 时所有点计入"""
        assert tail_copula_hat(sample, 2, 2.5, 2.5, 0.75) == pytest.approx(2.5 ** (4.0 / 3.0))

    def test_zero_argument(self, sample):
        """测试 x = 0 边界"""
        value = tail_copula_hat(sample, 2, 0.0, 1.0, 0.75)
        # R^X = 5 的点 R^Y = 4 >= 3
        assert value == pytest.approx(2.5 ** (4.0 / 3.0) * 0.2)
        assert tail_copula_hat(sample, 2, 0.0, 0.0, 0.75) == 0.0

    def test_monotone(self, pareto_pair_sample):
        """测试关于 x、y 不减"""
        grid = np.linspace(0.0, 3.0, 13)
        values = [tail_copula_hat(pareto_pair_sample, 40, x, 1.0, 0.7) for x in grid]
        assert all(a <= b for a, b in zip(values, values[1:]))
        values = [tail_copula_hat(pareto_pair_sample, 40, 1.0, y, 0.7) for y in grid]
        assert all(a <= b for a, b in zip(values, values[1:]))

    def test_invalid_eta(self, sample):
        """测试 η̂ 非正"""
        with pytest.raises(ConfigException):
            tail_copula_hat(sample, 2, 1.0, 1.0, 0.0)


class TestXiHat:
    """调整因子测试"""

    def test_hand_example(self):
        """测试手算示例"""
        # 秩 {(1,2),(2,4),(3,5),(4,3),(5,1)}
        sample = BivariateSample(x=[1, 2, 3, 4, 5], y=[2, 4, 5, 3, 1])
        assert sorted(xi_candidates(sample, 2).tolist()) == [1, 2, 3]
        assert xi_hat(sample, 2, 0.75) == 0.5

    def test_degenerate_zero_candidate(self):
        """测试第 m 个候选为 0"""
        sample = BivariateSample(x=[1, 2, 3, 4, 5], y=[1, 2, 3, 5, 4])
        with pytest.raises(DegenerateXiException) as exc:
            xi_hat(sample, 2, 0.75)
        assert "k" in exc.value.message
        assert exc.value.details["m"] == 1

    def test_degenerate_not_below_one(self):
        """测试第 m 个候选不小于 1"""
        # 顶部 Y 对应的 X 都很小：候选 (n - R^X)/k >= 1
        sample = BivariateSample(x=[5, 4, 3, 2, 1, 6], y=[6, 5, 4, 3, 2, 1])
        with pytest.raises(DegenerateXiException):
            xi_hat(sample, 1, 0.75)

    def test_eta_invariance(self):
        """测试 ξ̂ 与 η̂ 取值无关"""
        rng = np.random.default_rng(21)
        checked = 0
        for _ in range(100):
            n = int(rng.integers(50, 200))
            k = int(rng.integers(int(math.sqrt(n)) + 1, n // 2))
            z = rng.standard_normal(n)
            sample = BivariateSample(x=z + rng.standard_normal(n), y=z + rng.standard_normal(n))
            try:
                values = {xi_hat(sample, k, eta) for eta in (0.55, 0.75, 0.95)}
            except DegenerateXiException:
                continue
            assert len(values) == 1
            checked += 1
        assert checked > 30

    def test_brute_force_equivalence(self):
        """测试与字面下确界定义一致"""
        rng = np.random.default_rng(22)
        for _ in range(500):
            n = int(rng.integers(10, 201))
            k = int(rng.integers(1, n))
            eta = float(rng.uniform(0.55, 0.95))
            z = rng.standard_normal(n)
            sample = BivariateSample(x=z + rng.standard_normal(n), y=z + rng.standard_normal(n))
            literal = _brute_force_xi(sample, k, eta)
            try:
                value = xi_hat(sample, k, eta)
            except DegenerateXiException:
                assert literal is None or literal == 0.0 or literal >= 1.0
                continue
            assert value == literal
            # 更小的候选不满足条件
            smaller = [c / k for c in np.unique(xi_candidates(sample, k)) if c / k < value]
            target = (k / n) ** (2.0 - 1.0 / eta)
            for xi in smaller:
                assert tail_copula_hat(sample, k, xi, 1.0, eta) < target * (1.0 - 1e-12)

    @pytest.mark.slow
    def test_model1_target(self, model1):
        """测试模型 1 的 ξ* = (k/n)^{2-1/η}"""
        sample = sample_model(model1, 100_000, 23)
        assert xi_hat(sample, 3000, 0.75) == pytest.approx(0.03 ** (2.0 / 3.0), rel=0.3)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
