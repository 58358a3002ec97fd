"""
数据输入输出模块
价格 CSV 读取、负对数收益损失、周频重采样、滚动窗口估计以及 CSV/JSON 报告输出
"""
import json
import re
import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import settings
from .covar_estimators import ExtrapolationSet, estimate_all
from .sample_core import MIN_SAMPLE_SIZE, ArrayLike, BivariateSample, TailConfig
from .thread_pool_manager import ThreadPoolManager, thread_pool_manager
from .utils import (
    logger,
    format_float,
    ConfigException,
    DataFormatException,
    SampleValidationException,
)

PathLike = Union[str, Path]

# 表头占第 1 行，数据第 i 行（0 起）位于文件第 i+2 行
_HEADER_LINES = 1


class PriceSeries(BaseModel):
    """单一资产的价格序列，日期严格递增、价格为正"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    identifier: str = Field(..., description="资产标识（列名）")
    dates: List[datetime.date] = Field(..., description="观测日期")
    values: np.ndarray = Field(..., description="价格")

    @field_validator("values", mode="before")
    @classmethod
    def _convert(cls, v):
        arr = np.array(v, dtype=np.float64).reshape(-1)
        arr.flags.writeable = False
        return arr

    @model_validator(mode="after")
    def _check(self):
        if len(self.dates) != self.values.shape[0]:
            raise DataFormatException(
                "日期与价格数量不一致",
                details={"identifier": self.identifier, "dates": len(self.dates), "values": int(self.values.shape[0])}
            )
        for i in range(1, len(self.dates)):
            if self.dates[i] <= self.dates[i - 1]:
                raise DataFormatException(f"{self.identifier}: 日期非严格递增 ({self.dates[i]})")
        if np.any(~(self.values > 0)):
            raise DataFormatException(f"{self.identifier}: 价格必须为正")
        return self

    def __len__(self) -> int:
        return len(self.dates)

    def to_series(self) -> pd.Series:
        return pd.Series(self.values, index=pd.DatetimeIndex(self.dates), name=self.identifier)


class RollingConfig(BaseModel):
    """滚动窗口配置"""
    model_config = ConfigDict(frozen=True)

    window: int = Field(default_factory=lambda: settings.default_rolling_window,
                        description="窗口观测数", ge=MIN_SAMPLE_SIZE)
    step: int = Field(default_factory=lambda: settings.default_rolling_step,
                      description="相邻两次估计间隔的观测数", ge=1)
    config: TailConfig = Field(..., description="每个窗口使用的尾部超参数")

    def evaluation_points(self, length: int) -> List[int]:
        """窗口终点 t（不含），t = window, window+step, ... <= length"""
        if self.window > length:
            raise ConfigException(
                f"窗口 {self.window} 大于序列长度 {length}",
                details={"window": self.window, "length": length}
            )
        return list(range(self.window, length + 1, self.step))


class RollingRow(BaseModel):
    """单个窗口的估计结果"""
    end_index: int = Field(..., description="窗口终点（不含）")
    date: Optional[datetime.date] = Field(default=None, description="窗口内最后一个观测的日期")
    gamma1_hat: Optional[float] = None
    eta_hat: Optional[float] = None
    xi_hat: Optional[float] = None
    covar_int: Optional[float] = None
    coes_int: Optional[float] = None
    extrapolations: Optional[ExtrapolationSet] = None
    error: Optional[Dict[str, Any]] = Field(default=None, description="整个窗口失败时的错误")

    def flat(self) -> Dict[str, Any]:
        record = {
            "end_index": self.end_index,
            "date": self.date.isoformat() if self.date else None,
            "gamma1_hat": self.gamma1_hat,
            "eta_hat": self.eta_hat,
            "xi_hat": self.xi_hat,
            "covar_int": self.covar_int,
            "coes_int": self.coes_int,
        }
        if self.extrapolations is not None:
            record.update(self.extrapolations.estimates())
            record["errors"] = ";".join(
                f"{name}:{err.get('error_code')}" for name, err in self.extrapolations.errors.items()
            )
        elif self.error is not None:
            record["errors"] = f"window:{self.error.get('error_code')}"
        return record


# ---------------------------------------------------------------------------
# 输入
# ---------------------------------------------------------------------------

def _file_line(position: int) -> int:
    return position + _HEADER_LINES + 1


def _read_table(path: PathLike, date_column: str,
                columns: Optional[Sequence[str]]) -> Tuple[pd.DataFrame, List[str]]:
    """读取 CSV 原始文本，返回数据框与数值列名"""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8", skipinitialspace=True)
    except FileNotFoundError:
        raise DataFormatException(f"文件不存在: {path}", details={"path": str(path)})
    except pd.errors.EmptyDataError:
        raise DataFormatException(f"文件为空或缺少表头: {path}", details={"path": str(path)})
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        raise DataFormatException(
            f"CSV 格式错误: {e}",
            row=int(match.group(1)) if match else None,
            details={"path": str(path)}
        )

    if date_column not in frame.columns:
        raise DataFormatException(f"缺少日期列 '{date_column}'", details={"columns": list(frame.columns)})
    value_columns = list(columns) if columns else [c for c in frame.columns if c != date_column]
    missing = [c for c in value_columns if c not in frame.columns]
    if missing:
        raise DataFormatException(f"缺少数据列: {missing}", details={"columns": list(frame.columns)})
    if not value_columns:
        raise DataFormatException("至少需要一个价格列")
    return frame, value_columns


def _parse_dates(raw: pd.Series) -> List[datetime.date]:
    parsed = pd.to_datetime(raw.str.strip(), format="ISO8601", errors="coerce")
    bad = np.flatnonzero(parsed.isna().to_numpy())
    if bad.shape[0]:
        pos = int(bad[0])
        raise DataFormatException(f"第 {_file_line(pos)} 行日期无法解析: '{raw.iloc[pos]}'", row=_file_line(pos))
    days = parsed.dt.normalize()
    dup = np.flatnonzero(days.duplicated().to_numpy())
    if dup.shape[0]:
        pos = int(dup[0])
        raise DataFormatException(f"第 {_file_line(pos)} 行日期重复: {days.iloc[pos].date()}", row=_file_line(pos))
    steps = np.flatnonzero(np.diff(days.to_numpy().astype("datetime64[D]").astype(np.int64)) <= 0)
    if steps.shape[0]:
        pos = int(steps[0]) + 1
        raise DataFormatException(f"第 {_file_line(pos)} 行日期非递增: {days.iloc[pos].date()}", row=_file_line(pos))
    return [d.date() for d in days]


def _parse_values(raw: pd.Series, column: str, positive: bool) -> np.ndarray:
    values = pd.to_numeric(raw.str.strip(), errors="coerce").to_numpy(dtype=np.float64)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.shape[0]:
        pos = int(bad[0])
        raise DataFormatException(
            f"第 {_file_line(pos)} 行 {column} 不是有效数值: '{raw.iloc[pos]}'",
            row=_file_line(pos), details={"column": column}
        )
    if positive:
        bad = np.flatnonzero(values <= 0)
        if bad.shape[0]:
            pos = int(bad[0])
            raise DataFormatException(
                f"第 {_file_line(pos)} 行 {column} 价格非正: '{raw.iloc[pos]}'",
                row=_file_line(pos), details={"column": column}
            )
    return values


def load_price_csv(path: PathLike, date_column: str = "date",
                   price_columns: Optional[Sequence[str]] = None) -> Dict[str, PriceSeries]:
    """
    读取价格 CSV

    Args:
        path: 文件路径（UTF-8，含表头）
        date_column: ISO-8601 日期列名
        price_columns: 价格列名，默认除日期列外的所有列

    Returns:
        列名 -> PriceSeries，共享同一组日期

    Raises:
        DataFormatException: 格式错误行、重复日期、日期非递增、非正价格（附文件行号）
    """
    frame, columns = _read_table(path, date_column, price_columns)
    dates = _parse_dates(frame[date_column])
    series = {
        column: PriceSeries(identifier=column, dates=dates, values=_parse_values(frame[column], column, True))
        for column in columns
    }
    logger.info(f"读取价格文件 {path}: {len(dates)} 行, 资产 {columns}")
    return series


def load_loss_csv(path: PathLike, date_column: str = "date",
                  loss_columns: Optional[Sequence[str]] = None) -> Tuple[List[datetime.date], Dict[str, np.ndarray]]:
    """读取已是损失的 CSV（允许负值）"""
    frame, columns = _read_table(path, date_column, loss_columns)
    dates = _parse_dates(frame[date_column])
    return dates, {column: _parse_values(frame[column], column, False) for column in columns}


def losses_from_prices(series: PriceSeries) -> np.ndarray:
    """负对数收益 loss_t = -(log p_t - log p_{t-1})"""
    if len(series) < 2:
        raise SampleValidationException(
            f"{series.identifier}: 至少需要 2 个价格",
            details={"identifier": series.identifier, "length": len(series)}
        )
    return -np.diff(np.log(series.values))


def weekly_resample(series: PriceSeries) -> PriceSeries:
    """保留每个 ISO 周的最后一个观测"""
    s = series.to_series()
    iso = s.index.isocalendar()
    last = s.groupby([iso["year"].to_numpy(), iso["week"].to_numpy()], sort=False).tail(1)
    return PriceSeries(
        identifier=series.identifier,
        dates=[ts.date() for ts in last.index],
        values=last.to_numpy()
    )


# ---------------------------------------------------------------------------
# 滚动窗口
# ---------------------------------------------------------------------------

def rolling_estimates(x_losses: ArrayLike, y_losses: ArrayLike, rc: RollingConfig,
                      dates: Optional[Sequence[datetime.date]] = None,
                      workers: Optional[int] = None,
                      pool: Optional[ThreadPoolManager] = None) -> List[RollingRow]:
    """
    滚动窗口估计：每个终点 t 用 [t-window, t) 上的样本运行 estimate_all

    窗口内的错误记录在对应行中；输出按终点顺序排列

    Args:
        x_losses, y_losses: 对齐的损失序列
        rc: 滚动配置
        dates: 与损失对齐的日期（可选）
        workers: 并行线程数

    Returns:
        List[RollingRow]，行数为 floor((L - window)/step) + 1
    """
    x = np.asarray(x_losses, dtype=np.float64).reshape(-1)
    y = np.asarray(y_losses, dtype=np.float64).reshape(-1)
    if x.shape[0] != y.shape[0]:
        raise SampleValidationException(
            "x 与 y 损失序列未对齐",
            details={"len_x": int(x.shape[0]), "len_y": int(y.shape[0])}
        )
    if dates is not None and len(dates) != x.shape[0]:
        raise SampleValidationException("日期与损失序列长度不一致", details={"dates": len(dates), "length": int(x.shape[0])})
    points = rc.evaluation_points(x.shape[0])
    pool = pool or thread_pool_manager

    def evaluate(task: Dict[str, Any]):
        t = task["end_index"]
        sample = BivariateSample(x=x[t - rc.window:t], y=y[t - rc.window:t])
        return estimate_all(sample, rc.config)

    tasks = [{"task_id": f"window_{t}", "end_index": t} for t in points]
    logger.info(f"滚动估计: 长度={x.shape[0]}, 窗口={rc.window}, 步长={rc.step}, 共 {len(tasks)} 个窗口")
    outcomes = pool.execute_tasks_parallel(tasks, evaluate, max_workers=workers)

    rows = []
    for t, outcome in zip(points, outcomes):
        row_date = dates[t - 1] if dates is not None else None
        if not outcome["success"]:
            rows.append(RollingRow(end_index=t, date=row_date, error=outcome["error"]))
            continue
        evt, intermediate, extrapolations = outcome["result"]
        rows.append(RollingRow(
            end_index=t, date=row_date,
            gamma1_hat=evt.gamma1_hat, eta_hat=evt.eta_hat, xi_hat=evt.xi_hat,
            covar_int=intermediate.covar_int, coes_int=intermediate.coes_int,
            extrapolations=extrapolations
        ))
    return rows


# ---------------------------------------------------------------------------
# 输出
# ---------------------------------------------------------------------------

def _jsonable(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return _jsonable(value.model_dump())
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, datetime.date):
        return value.isoformat()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def write_json(report: Dict[str, Any], stream: TextIO):
    """JSON 输出；浮点数使用最短往返表示"""
    json.dump(_jsonable(report), stream, ensure_ascii=False, indent=2)
    stream.write("\n")


def _csv_cell(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if value is None:
        return ""
    return value


def write_csv(report: Dict[str, Any], records: List[Dict[str, Any]], stream: TextIO):
    """
    CSV 输出：以 '#' 开头的注释行记录命令、版本、种子与配置，随后为数据表

    浮点数按 17 位有效数字输出
    """
    stream.write(f"# command: {report.get('command')}\n")
    stream.write(f"# version: {report.get('version')}\n")
    stream.write(f"# seed: {report.get('seed')}\n")
    stream.write(f"# config: {json.dumps(_jsonable(report.get('config')), ensure_ascii=False)}\n")
    frame = pd.DataFrame([{k: _csv_cell(v) for k, v in record.items()} for record in records])
    frame.to_csv(stream, index=False, lineterminator="\n")


def read_report_csv(path_or_stream) -> pd.DataFrame:
    """读回 write_csv 的输出（跳过注释行）"""
    return pd.read_csv(path_or_stream, comment="#", float_precision="round_trip")
