"""
命令行入口
python -m src.main <子命令> ...

子命令：truth、simulate、grid、estimate、rolling、hillplot、etaplot、kplot、presets
退出码：0 成功；2 用法错误；1 估计器异常（错误 JSON 写入 stderr）
"""
import argparse
import json
import sys
import traceback
from contextlib import contextmanager
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from addone.plugin_manager import plugin_manager

from .config import settings
from .covar_estimators import ESTIMATOR_IDS, estimate_all
from .data_io import (
    RollingConfig,
    load_loss_csv,
    load_price_csv,
    losses_from_prices,
    rolling_estimates,
    weekly_resample,
    write_csv,
    write_json,
)
from .evt_estimators import eta_path, hill_path
from .sample_core import BivariateSample, TailConfig
from .simulation import (
    ModelSpec,
    grid_search,
    run_msre,
    true_coes,
    true_covar,
    true_var_y,
)
from .utils import logger, format_report, ConfigException, DataFormatException, EstimatorException

PRESET_MODELS = ("model1", "model2", "model3")
HandlerResult = Tuple[Dict[str, Any], Any, List[Dict[str, Any]]]


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"必须为正整数: {text}")
    return value


def _level(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"概率水平必须在 (0,1) 内: {text}")
    return value


def _int_list(text: str) -> List[int]:
    """'10,20,30' 或 'start:stop:step'（含 stop）"""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 1
            if step < 1:
                raise ValueError
            return list(range(start, stop + 1, step))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"无效的整数列表: {text}")


# ---------------------------------------------------------------------------
# 参数组
# ---------------------------------------------------------------------------

def _add_model_args(p: argparse.ArgumentParser):
    p.add_argument("--model", required=True, choices=("mo", "mixture") + PRESET_MODELS,
                   help="模型：mo（Marshall-Olkin）、mixture（Pareto 混合）或预设 model1/2/3")
    p.add_argument("--a", type=float, help="边际 Pareto 指数")
    p.add_argument("--a1", type=float, help="Marshall-Olkin 参数 a1")
    p.add_argument("--a2", type=float, help="Marshall-Olkin 参数 a2")
    p.add_argument("--b", type=float, help="混合模型 Z2 的 Pareto 指数")


def _add_tail_args(p: argparse.ArgumentParser, required: bool = True):
    p.add_argument("--k", type=_positive_int, required=required, help="CoVaR/CoES/ξ 的尾部样本数")
    p.add_argument("--k1", type=_positive_int, required=required, help="Hill 估计的尾部样本数")
    p.add_argument("--k2", type=_positive_int, help="η 估计的尾部样本数（默认等于 k1）")
    p.add_argument("--tau-prime", type=_level, required=True, help="极端水平 τ′")


def _add_input_args(p: argparse.ArgumentParser, multi_x: bool = False, need_y: bool = True):
    p.add_argument("--input", required=True, help="CSV 文件（date 列 + 价格列）")
    if multi_x:
        p.add_argument("--x-column", action="append", required=True, help="X 资产列，可重复")
    else:
        p.add_argument("--x-column", required=True, help="X 资产列")
    if need_y:
        p.add_argument("--y-column", required=True, help="Y（条件）资产列")
        p.add_argument("--y-input", help="Y 列所在的另一个 CSV 文件，日期必须一致")
    p.add_argument("--date-column", default="date", help="日期列名")
    transform = p.add_mutually_exclusive_group()
    transform.add_argument("--losses", action="store_true", help="输入列已是损失，不做对数收益变换")
    transform.add_argument("--weekly", action="store_true", help="先按 ISO 周取最后一个价格再求损失，不能与 --losses 同用")


def _add_sweep_args(p: argparse.ArgumentParser):
    p.add_argument("--k-values", type=_int_list, required=True, help="扫描的 k 值：'a,b,c' 或 'start:stop:step'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="covar-extrapolator", description=f"{settings.app_name} v{settings.app_version}")
    parser.add_argument("--seed", type=int, default=settings.default_seed, help="随机种子")
    parser.add_argument("--output", choices=("csv", "json"), default="json", help="输出格式")
    parser.add_argument("--output-file", help="输出文件，默认标准输出")
    parser.add_argument("--quiet", action="store_true", help="仅输出错误日志")
    parser.add_argument("--workers", type=_positive_int, help="并行线程数")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("truth", help="模型 CoVaR/CoES 真值")
    _add_model_args(p)
    p.add_argument("--tau", type=_level, required=True, help="概率水平 τ")
    p.add_argument("--method", choices=("auto", "analytic", "numeric"), default="auto", help="求解方法")

    p = sub.add_parser("simulate", help="MSRE 模拟实验")
    _add_model_args(p)
    p.add_argument("--n", type=_positive_int, required=True, help="样本量")
    _add_tail_args(p, required=False)
    p.add_argument("--replications", type=_positive_int, default=1000, help="重复次数 N")
    p.add_argument("--ratios", action="store_true", help="输出逐次 估计/真值 比值")

    p = sub.add_parser("grid", help="(k, k1) 网格搜索")
    _add_model_args(p)
    p.add_argument("--n", type=_positive_int, required=True, help="样本量")
    p.add_argument("--tau-prime", type=_level, required=True, help="极端水平 τ′")
    p.add_argument("--k-grid", type=_int_list, required=True, help="k 网格")
    p.add_argument("--k1-grid", type=_int_list, required=True, help="k1 网格（k2 = k1）")
    p.add_argument("--replications", type=_positive_int, default=100, help="每个单元的重复次数")
    p.add_argument("--estimator", choices=ESTIMATOR_IDS, default="covar_i", help="目标估计量")

    p = sub.add_parser("estimate", help="对数据做 CoVaR/CoES 外推估计")
    _add_input_args(p, multi_x=True)
    _add_tail_args(p)

    p = sub.add_parser("rolling", help="滚动窗口估计")
    _add_input_args(p)
    _add_tail_args(p)
    p.add_argument("--window", type=_positive_int, default=settings.default_rolling_window, help="窗口观测数")
    p.add_argument("--step", type=_positive_int, default=settings.default_rolling_step, help="步长")

    p = sub.add_parser("hillplot", help="γ̂₁ 随 k1 变化的数据")
    _add_input_args(p, need_y=False)
    _add_sweep_args(p)

    p = sub.add_parser("etaplot", help="η̂ 随 k2 变化的数据")
    _add_input_args(p)
    _add_sweep_args(p)

    p = sub.add_parser("kplot", help="外推估计随 k 变化的数据")
    _add_input_args(p)
    _add_tail_args(p, required=False)
    _add_sweep_args(p)

    sub.add_parser("presets", help="列出模型预设及其 MSRE 表配置")
    return parser


# ---------------------------------------------------------------------------
# 辅助函数
# ---------------------------------------------------------------------------

def resolve_model(args, parser: argparse.ArgumentParser) -> ModelSpec:
    """由 --model 与参数构造 ModelSpec"""
    if args.model in PRESET_MODELS:
        params = plugin_manager.get_model_params(args.model)
        if params is None:
            parser.error(f"未找到模型预设: {args.model}")
        return ModelSpec(**params)
    if args.model == "mo":
        if None in (args.a, args.a1, args.a2):
            parser.error("--model mo 需要 --a、--a1、--a2")
        return ModelSpec.marshall_olkin(args.a, args.a1, args.a2)
    if None in (args.a, args.b):
        parser.error("--model mixture 需要 --a、--b")
    return ModelSpec.pareto_mixture(args.a, args.b)


def _tail_config(args, k: Optional[int] = None, k1: Optional[int] = None) -> TailConfig:
    k = k if k is not None else args.k
    k1 = k1 if k1 is not None else args.k1
    return TailConfig(k=k, k1=k1, k2=args.k2 or k1, tau_prime=args.tau_prime)


def _load_one(path: str, args, columns: Sequence[str]):
    if args.losses:
        return load_loss_csv(path, args.date_column, columns)
    prices = load_price_csv(path, args.date_column, columns)
    if args.weekly:
        prices = {name: weekly_resample(series) for name, series in prices.items()}
    first = next(iter(prices.values()))
    return first.dates[1:], {name: losses_from_prices(series) for name, series in prices.items()}


def load_losses(args, x_columns: Sequence[str]) -> Tuple[list, Dict[str, np.ndarray], Optional[np.ndarray]]:
    """
    读取 X 列（可多列）与 Y 列的损失序列

    Returns:
        (dates, {x 列: 损失}, y 损失或 None)
    """
    y_column = getattr(args, "y_column", None)
    y_input = getattr(args, "y_input", None)
    columns = list(x_columns)
    if y_column and not y_input:
        columns.append(y_column)
    dates, losses = _load_one(args.input, args, columns)
    y = None
    if y_column:
        if y_input:
            y_dates, y_losses = _load_one(y_input, args, [y_column])
            if list(y_dates) != list(dates):
                raise DataFormatException("X 与 Y 文件的日期未对齐", details={"x_input": args.input, "y_input": y_input})
            y = y_losses[y_column]
        else:
            y = losses[y_column]
    return dates, {c: losses[c] for c in x_columns}, y


def _estimate_record(asset: str, sample: BivariateSample, config: TailConfig) -> Dict[str, Any]:
    evt, intermediate, extrapolations = estimate_all(sample, config)
    record = {
        "asset": asset,
        "n": sample.n,
        "gamma1_hat": evt.gamma1_hat,
        "eta_hat": evt.eta_hat,
        "xi_hat": evt.xi_hat,
        "var_x_int": evt.var_x_int,
        "var_y_int": evt.var_y_int,
        "covar_int": intermediate.covar_int,
        "coes_int": intermediate.coes_int,
    }
    record.update(extrapolations.estimates())
    record["diagnostics"] = " | ".join(extrapolations.diagnostics)
    record["errors"] = ";".join(f"{name}:{err.get('error_code')}" for name, err in extrapolations.errors.items())
    return record


# ---------------------------------------------------------------------------
# 子命令
# ---------------------------------------------------------------------------

def cmd_truth(args, parser) -> HandlerResult:
    spec = resolve_model(args, parser)
    covar = true_covar(spec, args.tau, method=args.method)
    coes = true_coes(spec, args.tau, method=args.method)
    record = {
        "model": spec.name or spec.variant,
        "tau": args.tau,
        "var_y": true_var_y(spec, args.tau),
        "covar": covar,
        "coes": coes,
        "gamma1": spec.gamma1,
        "eta": spec.eta,
    }
    config = {"model": spec.describe(), "tau": args.tau, "method": args.method}
    return config, record, [record]


def cmd_simulate(args, parser) -> HandlerResult:
    spec = resolve_model(args, parser)
    entry = None
    if args.model in PRESET_MODELS:
        entry = plugin_manager.get_table_entry(args.model, args.n, args.tau_prime)
    k, k1 = args.k, args.k1
    if k is None or k1 is None:
        if entry is None:
            parser.error("未指定 --k/--k1，且预设中没有 (n, τ′) 对应的表项")
        k = entry["k"] if k is None else k
        k1 = entry["k1"] if k1 is None else k1
    config = _tail_config(args, k, k1)
    reports = run_msre(spec, args.n, args.tau_prime, config, args.replications, args.seed, workers=args.workers)

    echo = next(iter(reports.values())).config
    if args.ratios:
        records = []
        for r in range(args.replications):
            row = {"replication": r}
            row.update({name: reports[name].ratios[r] for name in ESTIMATOR_IDS})
            records.append(row)
        return echo, records, records

    records = []
    for name in ESTIMATOR_IDS:
        report = reports[name]
        records.append({
            "estimator": name,
            "msre": report.msre,
            "successful": report.successful,
            "failed": len(report.failures),
            "truth": report.truth,
            "ratio_iqr": report.iqr(),
            "reference_msre": entry["msre"].get(name) if entry else None,
        })
    return echo, records, records


def cmd_grid(args, parser) -> HandlerResult:
    spec = resolve_model(args, parser)
    result = grid_search(spec, args.n, args.tau_prime, args.k_grid, args.k1_grid,
                         args.replications, args.seed, estimator=args.estimator, workers=args.workers)
    config = {
        "model": spec.describe(), "n": args.n, "tau_prime": args.tau_prime,
        "k_grid": args.k_grid, "k1_grid": args.k1_grid, "N": args.replications,
        "estimator": args.estimator, "seed": args.seed,
    }
    records = [cell.model_dump() for cell in result.surface]
    return config, result.model_dump(), records


def cmd_estimate(args, parser) -> HandlerResult:
    config = _tail_config(args)
    _, x_losses, y = load_losses(args, args.x_column)
    records = [
        _estimate_record(asset, BivariateSample(x=x, y=y), config)
        for asset, x in x_losses.items()
    ]
    echo = {"input": args.input, "y_column": args.y_column, **config.model_dump(),
            "weekly": args.weekly, "losses": args.losses}
    return echo, records, records


def cmd_rolling(args, parser) -> HandlerResult:
    rc = RollingConfig(window=args.window, step=args.step, config=_tail_config(args))
    dates, x_losses, y = load_losses(args, [args.x_column])
    rows = rolling_estimates(x_losses[args.x_column], y, rc, dates=dates, workers=args.workers)
    records = [row.flat() for row in rows]
    echo = {"input": args.input, "x_column": args.x_column, "y_column": args.y_column,
            "window": rc.window, "step": rc.step, **rc.config.model_dump()}
    return echo, records, records


def cmd_hillplot(args, parser) -> HandlerResult:
    _, x_losses, _ = load_losses(args, [args.x_column])
    path = hill_path(x_losses[args.x_column], args.k_values)
    records = [{"k1": k1, "gamma1_hat": g} for k1, g in zip(args.k_values, path)]
    return {"input": args.input, "column": args.x_column, "k_values": args.k_values}, records, records


def cmd_etaplot(args, parser) -> HandlerResult:
    _, x_losses, y = load_losses(args, [args.x_column])
    sample = BivariateSample(x=x_losses[args.x_column], y=y)
    path = eta_path(sample, args.k_values)
    records = [{"k2": k2, "eta_hat": e} for k2, e in zip(args.k_values, path)]
    echo = {"input": args.input, "x_column": args.x_column, "y_column": args.y_column, "k_values": args.k_values}
    return echo, records, records


def cmd_kplot(args, parser) -> HandlerResult:
    if args.k1 is None:
        parser.error("kplot 需要 --k1")
    _, x_losses, y = load_losses(args, [args.x_column])
    sample = BivariateSample(x=x_losses[args.x_column], y=y)
    records = []
    for k in args.k_values:
        _, _, extrapolations = estimate_all(sample, _tail_config(args, k=k))
        records.append({
            "k": k,
            "covar_i": extrapolations.covar_i,
            "covar_ii": extrapolations.covar_ii,
            "coes_iii": extrapolations.coes_iii,
        })
    echo = {"input": args.input, "x_column": args.x_column, "y_column": args.y_column,
            "k_values": args.k_values, "k1": args.k1, "k2": args.k2 or args.k1, "tau_prime": args.tau_prime}
    return echo, records, records


def cmd_presets(args, parser) -> HandlerResult:
    records = []
    for name in plugin_manager.list_plugins():
        preset = plugin_manager.get_model_config(name)
        for entry in preset.get("table", []):
            row = {"model": name, "variant": preset["variant"],
                   "n": entry["n"], "tau_prime": entry["tau_prime"], "k": entry["k"], "k1": entry["k1"]}
            row.update({f"msre_{est}": value for est, value in entry["msre"].items()})
            records.append(row)
    return {"presets": plugin_manager.list_plugins()}, records, records


COMMANDS = {
    "truth": cmd_truth,
    "simulate": cmd_simulate,
    "grid": cmd_grid,
    "estimate": cmd_estimate,
    "rolling": cmd_rolling,
    "hillplot": cmd_hillplot,
    "etaplot": cmd_etaplot,
    "kplot": cmd_kplot,
    "presets": cmd_presets,
}


@contextmanager
def _output_stream(path: Optional[str]):
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as stream:
        yield stream


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    """
    命令行主函数

    Returns:
        退出码：0 成功，2 用法错误，1 估计器异常或其他运行期错误
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.quiet:
            logger.set_level("ERROR")
        config, results, records = COMMANDS[args.command](args, parser)
        seed = args.seed if args.command in ("simulate", "grid") else None
        report = format_report(args.command, config, results, seed=seed)
        with _output_stream(args.output_file) as stream:
            if args.output == "json":
                write_json(report, stream)
            else:
                write_csv(report, records, stream)
        return 0
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    except ValidationError as e:
        error = ConfigException(f"参数校验失败: {e.errors()[0].get('msg')}", details={"errors": len(e.errors())})
        sys.stderr.write(json.dumps(error.to_dict(), ensure_ascii=False) + "\n")
        return 1
    except EstimatorException as e:
        logger.error(f"{e.error_code}: {e.message}")
        sys.stderr.write(json.dumps(e.to_dict(), ensure_ascii=False, default=str) + "\n")
        return 1
    except Exception as e:
        logger.error(f"未处理的异常: {str(e)}")
        logger.debug(f"异常堆栈: {traceback.format_exc()}")
        error = EstimatorException(
            message=f"执行命令时发生未知错误: {str(e)}",
            error_code="UNKNOWN_ERROR",
            details={"exception": type(e).__name__}
        )
        sys.stderr.write(json.dumps(error.to_dict(), ensure_ascii=False, default=str) + "\n")
        return 1


def main():
    """主函数"""
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
