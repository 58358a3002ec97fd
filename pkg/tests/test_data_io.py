"""
数据输入输出测试用例
"""
import io
import json
from datetime import date, timedelta

import numpy as np
import pandas as pd
import pytest

from src.covar_estimators import estimate_all
from src.data_io import (
    PriceSeries,
    RollingConfig,
    RollingRow,
    load_loss_csv,
    load_price_csv,
    losses_from_prices,
    read_report_csv,
    rolling_estimates,
    weekly_resample,
    write_csv,
    write_json,
)
from src.sample_core import BivariateSample, TailConfig
from src.simulation import sample_model
from src.utils import ConfigException, DataFormatException, SampleValidationException, format_report


def _write(tmp_path, text, name="prices.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def _weekdays(start: date, count: int):
    days, current = [], start
    while len(days) < count:
        if current.weekday() < 5:
            days.append(current)
        current += timedelta(days=1)
    return days


class TestLoadPrices:
    """价格文件读取测试"""

    def test_two_assets(self, tmp_path):
        """测试读取两列价格"""
        path = _write(tmp_path, "date,A,B\n2024-01-02,100,50\n2024-01-03,90,51\n2024-01-04,99,52\n")
        prices = load_price_csv(path)
        assert sorted(prices) == ["A", "B"]
        assert prices["A"].dates == [date(2024, 1, 2), date(2024, 1, 3), date(2024, 1, 4)]
        assert prices["B"].values.tolist() == [50.0, 51.0, 52.0]

    def test_selected_columns(self, tmp_path):
        """测试只读取指定列"""
        path = _write(tmp_path, "day,A,B\n2024-01-02,1,2\n2024-01-03,3,4\n")
        prices = load_price_csv(path, date_column="day", price_columns=["B"])
        assert list(prices) == ["B"]

    def test_non_positive_price(self, tmp_path):
        """测试非正价格报告文件行号"""
        rows = [f"2024-01-{d:02d},{100 + d}" for d in range(2, 12)]
        rows[5] = "2024-01-07,0.00"
        path = _write(tmp_path, "date,A\n" + "\n".join(rows) + "\n")
        with pytest.raises(DataFormatException) as exc:
            load_price_csv(path)
        assert exc.value.row == 7
        assert exc.value.details["row"] == 7

    def test_bad_value(self, tmp_path):
        """测试无法解析的数值"""
        path = _write(tmp_path, "date,A\n2024-01-02,1\n2024-01-03,abc\n")
        with pytest.raises(DataFormatException) as exc:
            load_price_csv(path)
        assert exc.value.row == 3

    def test_bad_date(self, tmp_path):
        """测试无法解析的日期"""
        path = _write(tmp_path, "date,A\n2024-01-02,1\n2024-13-45,2\n")
        with pytest.raises(DataFormatException) as exc:
            load_price_csv(path)
        assert exc.value.row == 3

    def test_duplicate_date(self, tmp_path):
        """测试重复日期"""
        path = _write(tmp_path, "date,A\n2024-01-02,1\n2024-01-03,2\n2024-01-03,3\n")
        with pytest.raises(DataFormatException) as exc:
            load_price_csv(path)
        assert exc.value.row == 4

    def test_decreasing_date(self, tmp_path):
        """测试日期非递增"""
        path = _write(tmp_path, "date,A\n2024-01-03,1\n2024-01-02,2\n")
        with pytest.raises(DataFormatException) as exc:
            load_price_csv(path)
        assert exc.value.row == 3

    def test_ragged_row(self, tmp_path):
        """测试字段数不一致的行"""
        path = _write(tmp_path, "date,A\n2024-01-02,1\n2024-01-03,2,3\n")
        with pytest.raises(DataFormatException) as exc:
            load_price_csv(path)
        assert exc.value.row == 3

    def test_missing_file(self, tmp_path):
        """测试文件不存在"""
        with pytest.raises(DataFormatException) as exc:
            load_price_csv(tmp_path / "missing.csv")
        assert exc.value.error_code == "DATA_FORMAT_ERROR"

    def test_missing_column(self, tmp_path):
        """测试缺少列"""
        path = _write(tmp_path, "date,A\n2024-01-02,1\n")
        with pytest.raises(DataFormatException):
            load_price_csv(path, price_columns=["C"])
        with pytest.raises(DataFormatException):
            load_price_csv(path, date_column="when")

    def test_loss_file_allows_negative(self, tmp_path):
        """测试损失文件允许负值"""
        path = _write(tmp_path, "date,X,Y\n2024-01-02,-0.5,0.1\n2024-01-03,0.2,-0.3\n")
        dates, losses = load_loss_csv(path)
        assert len(dates) == 2
        assert losses["X"].tolist() == [-0.5, 0.2]


class TestPriceSeries:
    """价格序列测试"""

    def test_losses(self):
        """测试负对数收益"""
        series = PriceSeries(identifier="A", dates=_weekdays(date(2024, 1, 2), 3), values=[100.0, 90.0, 99.0])
        losses = losses_from_prices(series)
        assert losses == pytest.approx([0.105361, -0.095310], abs=1e-6)

    def test_constant_prices(self):
        """测试常数价格损失为 0"""
        series = PriceSeries(identifier="A", dates=_weekdays(date(2024, 1, 2), 5), values=[7.0] * 5)
        assert losses_from_prices(series).tolist() == [0.0] * 4

    def test_too_short(self):
        """测试少于两个价格"""
        series = PriceSeries(identifier="A", dates=[date(2024, 1, 2)], values=[1.0])
        with pytest.raises(SampleValidationException):
            losses_from_prices(series)

    def test_validation(self):
        """测试构造时的校验"""
        with pytest.raises(DataFormatException):
            PriceSeries(identifier="A", dates=[date(2024, 1, 3), date(2024, 1, 2)], values=[1.0, 2.0])
        with pytest.raises(DataFormatException):
            PriceSeries(identifier="A", dates=[date(2024, 1, 2), date(2024, 1, 3)], values=[1.0, -2.0])

    def test_weekly_resample(self):
        """测试按 ISO 周保留最后一个观测"""
        days = _weekdays(date(2024, 1, 1), 23)
        assert days[-1] == date(2024, 1, 31)
        series = PriceSeries(identifier="A", dates=days, values=np.arange(1.0, 24.0))
        weekly = weekly_resample(series)
        assert weekly.dates == [date(2024, 1, d) for d in (5, 12, 19, 26, 31)]
        assert weekly.values.tolist() == [5.0, 10.0, 15.0, 20.0, 23.0]

    def test_weekly_two_weeks(self):
        """测试连续 10 个工作日保留两个周五"""
        days = _weekdays(date(2024, 3, 4), 10)
        weekly = weekly_resample(PriceSeries(identifier="A", dates=days, values=np.arange(1.0, 11.0)))
        assert weekly.dates == [date(2024, 3, 8), date(2024, 3, 15)]

    def test_weekly_missing_friday(self):
        """测试缺少周五时保留该周最后一个交易日"""
        days = [date(2024, 3, 4), date(2024, 3, 6), date(2024, 3, 7), date(2024, 3, 11)]
        weekly = weekly_resample(PriceSeries(identifier="A", dates=days, values=[1.0, 2.0, 3.0, 4.0]))
        assert weekly.dates == [date(2024, 3, 7), date(2024, 3, 11)]
        assert weekly.values.tolist() == [3.0, 4.0]

    def test_weekly_idempotent(self):
        """测试周频序列重采样不变"""
        weekly = weekly_resample(PriceSeries(identifier="A", dates=_weekdays(date(2024, 1, 1), 40),
                                             values=np.linspace(1.0, 2.0, 40)))
        again = weekly_resample(weekly)
        assert again.dates == weekly.dates
        assert np.array_equal(again.values, weekly.values)

    def test_weekly_across_year(self):
        """测试跨年 ISO 周"""
        days = [date(2024, 12, 30), date(2024, 12, 31), date(2025, 1, 2), date(2025, 1, 6)]
        weekly = weekly_resample(PriceSeries(identifier="A", dates=days, values=[1.0, 2.0, 3.0, 4.0]))
        assert weekly.dates == [date(2025, 1, 2), date(2025, 1, 6)]


class TestRolling:
    """滚动窗口测试"""

    @pytest.fixture
    def losses(self, model1):
        sample = sample_model(model1, 1600, 99)
        return np.array(sample.x), np.array(sample.y)

    def test_window_count(self, losses):
        """测试窗口终点与行数"""
        x, y = losses
        rc = RollingConfig(window=1500, step=21, config=TailConfig(k=150, k1=150, k2=150, tau_prime=0.999))
        rows = rolling_estimates(x, y, rc)
        assert [row.end_index for row in rows] == [1500, 1521, 1542, 1563, 1584]
        first = estimate_all(BivariateSample(x=x[:1500], y=y[:1500]), rc.config)
        assert rows[0].gamma1_hat == first[0].gamma1_hat
        assert rows[0].extrapolations.covar_ii == first[2].covar_ii

    def test_full_window(self, losses):
        """测试窗口等于序列长度时与静态估计一致"""
        x, y = losses
        config = TailConfig(k=160, k1=160, k2=160, tau_prime=0.99)
        rows = rolling_estimates(x, y, RollingConfig(window=1600, step=5, config=config))
        assert len(rows) == 1
        evt, intermediate, extrapolations = estimate_all(BivariateSample(x=x, y=y), config)
        assert rows[0].eta_hat == evt.eta_hat
        assert rows[0].coes_int == intermediate.coes_int
        assert rows[0].extrapolations.estimates() == extrapolations.estimates()

    def test_row_count_formula(self):
        """测试行数为 floor((L - window)/step) + 1"""
        rng = np.random.default_rng(5)
        config = TailConfig(k=2, k1=2, k2=2, tau_prime=0.99)
        for _ in range(20):
            window = int(rng.integers(4, 200))
            length = window + int(rng.integers(0, 500))
            step = int(rng.integers(1, 50))
            points = RollingConfig(window=window, step=step, config=config).evaluation_points(length)
            assert len(points) == (length - window) // step + 1
            assert points[-1] <= length

    def test_dates(self, losses):
        """测试行日期为窗口内最后一个观测"""
        x, y = losses
        dates = _weekdays(date(2018, 1, 1), 1600)
        rc = RollingConfig(window=1590, step=5, config=TailConfig(k=100, k1=100, k2=100, tau_prime=0.99))
        rows = rolling_estimates(x, y, rc, dates=dates)
        assert [row.date for row in rows] == [dates[1589], dates[1594], dates[1599]]
        assert rows[0].flat()["date"] == dates[1589].isoformat()

    def test_rolling_row_date_field(self):
        """测试行记录的日期字段类型与 ISO 字符串解析"""
        row = RollingRow(end_index=10, date="2024-01-31")
        assert row.date == date(2024, 1, 31)
        assert row.flat()["date"] == "2024-01-31"
        assert RollingRow(end_index=10).flat()["date"] is None

    def test_window_error_isolated(self):
        """测试单个窗口失败不影响其他窗口"""
        x = np.concatenate([-np.ones(10), np.linspace(1.0, 2.0, 10)])
        y = np.linspace(1.0, 2.0, 20)
        rc = RollingConfig(window=10, step=10, config=TailConfig(k=3, k1=3, k2=3, tau_prime=0.99))
        rows = rolling_estimates(x, y, rc)
        assert len(rows) == 2
        assert rows[0].extrapolations.errors["gamma1_hat"]["error_code"] == "INVALID_SAMPLE"
        assert rows[1].gamma1_hat is not None

    @pytest.mark.slow
    def test_extrapolations_move_together(self, model1):
        """测试滚动 CoVaR-I 与 CoVaR-II 路径高度相关"""
        sample = sample_model(model1, 4000, 123)
        rc = RollingConfig(window=1500, step=21, config=TailConfig(k=400, k1=400, k2=400, tau_prime=0.999))
        rows = rolling_estimates(sample.x, sample.y, rc)
        pairs = np.array([
            (row.extrapolations.covar_i, row.extrapolations.covar_ii) for row in rows
            if row.extrapolations.covar_i is not None and row.extrapolations.covar_ii is not None
        ])
        assert pairs.shape[0] > 60
        assert np.corrcoef(pairs[:, 0], pairs[:, 1])[0, 1] > 0.9

    def test_misaligned(self):
        """测试序列未对齐"""
        rc = RollingConfig(window=4, step=1, config=TailConfig(k=1, k1=1, k2=1, tau_prime=0.99))
        with pytest.raises(SampleValidationException):
            rolling_estimates(np.ones(10), np.ones(9), rc)

    def test_window_too_long(self):
        """测试窗口大于序列长度"""
        rc = RollingConfig(window=50, step=1, config=TailConfig(k=1, k1=1, k2=1, tau_prime=0.99))
        with pytest.raises(ConfigException):
            rolling_estimates(np.ones(20), np.ones(20), rc)

    def test_window_too_small(self):
        """测试窗口小于最小样本量"""
        with pytest.raises(ValueError):
            RollingConfig(window=3, step=1, config=TailConfig(k=1, k1=1, k2=1, tau_prime=0.99))


class TestReportWriters:
    """报告输出测试"""

    @pytest.fixture
    def records(self):
        return [
            {"asset": "A", "value": 0.1 + 0.2, "small": 1e-300, "missing": None},
            {"asset": "B", "value": 1.0 / 3.0, "small": 12345.678901234567, "missing": 2.5},
        ]

    def test_json_round_trip(self, records):
        """测试 JSON 浮点数精确往返"""
        report = format_report("estimate", {"k": 10, "tau_prime": 0.999}, records)
        buffer = io.StringIO()
        write_json(report, buffer)
        loaded = json.loads(buffer.getvalue())
        assert loaded["command"] == "estimate"
        assert loaded["config"]["tau_prime"] == 0.999
        assert loaded["results"][0]["value"] == 0.1 + 0.2
        assert loaded["results"][1]["small"] == 12345.678901234567
        assert loaded["results"][0]["missing"] is None

    def test_csv_round_trip(self, records):
        """测试 CSV 浮点数精确往返且与 JSON 一致"""
        report = format_report("estimate", {"k": 10}, records, seed=42)
        buffer = io.StringIO()
        write_csv(report, records, buffer)
        text = buffer.getvalue()
        assert text.startswith("# command: estimate\n")
        assert "# seed: 42\n" in text
        frame = read_report_csv(io.StringIO(text))
        assert frame["value"].tolist() == [0.1 + 0.2, 1.0 / 3.0]
        assert frame["small"].tolist() == [1e-300, 12345.678901234567]
        assert pd.isna(frame["missing"].iloc[0])

        json_buffer = io.StringIO()
        write_json(report, json_buffer)
        loaded = json.loads(json_buffer.getvalue())
        assert [r["value"] for r in loaded["results"]] == frame["value"].tolist()

    def test_non_finite_json(self):
        """测试非有限浮点数输出为 null"""
        buffer = io.StringIO()
        write_json(format_report("truth", {}, {"value": float("inf")}), buffer)
        assert json.loads(buffer.getvalue())["results"]["value"] is None


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
