#!/usr/bin/env python3
"""
MSRE 表复现脚本
按模型预设中的 (n, τ′, k, k1) 运行 MSRE 实验，并与参考值并列输出
"""
import sys
import argparse
from pathlib import Path
from typing import Any, Dict, List

# 添加项目根目录到Python路径
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from addone.plugin_manager import plugin_manager
from src.config import settings
from src.covar_estimators import ESTIMATOR_IDS
from src.data_io import write_csv
from src.sample_core import TailConfig
from src.simulation import ModelSpec, run_msre, true_values
from src.utils import logger, format_report


def reproduce_model(name: str, replications: int, seed: int, n_filter: List[int]) -> List[Dict[str, Any]]:
    """复现单个模型的全部表项"""
    spec = ModelSpec(**plugin_manager.get_model_params(name))
    rows = []
    for entry in plugin_manager.get_model_config(name)["table"]:
        if n_filter and entry["n"] not in n_filter:
            continue
        config = TailConfig(k=entry["k"], k1=entry["k1"], k2=entry["k1"], tau_prime=entry["tau_prime"])
        truth = true_values(spec, entry["tau_prime"])
        logger.info(f"{name}: n={entry['n']}, τ′={entry['tau_prime']}, k={entry['k']}, k1={entry['k1']}")
        reports = run_msre(spec, entry["n"], entry["tau_prime"], config, replications, seed, truth=truth)
        for estimator in ESTIMATOR_IDS:
            report = reports[estimator]
            rows.append({
                "model": name,
                "n": entry["n"],
                "tau_prime": entry["tau_prime"],
                "k": entry["k"],
                "k1": entry["k1"],
                "estimator": estimator,
                "msre": report.msre,
                "reference_msre": entry["msre"][estimator],
                "successful": report.successful,
            })
    return rows


def main():
    """主函数"""
    parser = argparse.ArgumentParser(description="MSRE 表复现工具")
    parser.add_argument("--models", nargs="+", default=plugin_manager.list_plugins(), help="模型预设")
    parser.add_argument("--n", type=int, nargs="*", default=[], help="只复现指定样本量")
    parser.add_argument("--replications", type=int, default=1000, help="重复次数 N")
    parser.add_argument("--seed", type=int, default=settings.default_seed, help="随机种子")
    parser.add_argument("--output", type=str, help="CSV 输出文件，默认标准输出")
    args = parser.parse_args()

    print("=" * 60, file=sys.stderr)
    print(f"{settings.app_name} - MSRE 表复现", file=sys.stderr)
    print("=" * 60, file=sys.stderr)

    rows = []
    for name in args.models:
        if not plugin_manager.has_plugin(name):
            print(f"❌ 未找到模型预设: {name}", file=sys.stderr)
            sys.exit(2)
        rows.extend(reproduce_model(name, args.replications, args.seed, args.n))

    report = format_report(
        "reproduce_msre_table",
        {"models": args.models, "n": args.n, "N": args.replications},
        None,
        seed=args.seed
    )
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as stream:
            write_csv(report, rows, stream)
        print(f"✅ 结果已写入: {args.output}", file=sys.stderr)
    else:
        write_csv(report, rows, sys.stdout)


if __name__ == "__main__":
    main()
