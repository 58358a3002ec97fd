"""
配置管理模块
通过环境变量加载配置信息，所有值都有默认值，命令行参数优先
"""
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """应用配置类"""

    # 基础配置
    app_name: str = "CoVaR Extrapolator"
    app_version: str = "1.0.0"

    # 多线程配置（蒙特卡洛重复实验、滚动窗口）
    max_concurrent_threads: int = 4  # 最大并发线程数
    thread_pool_timeout: int = 3600  # 线程池任务超时时间（秒）
    enable_threading: bool = True    # 是否启用多线程

    # 数值计算配置
    root_rtol: float = 1e-10         # 二分法相对精度
    root_max_doublings: int = 200    # 区间倍增上限
    quad_epsrel: float = 1e-8        # 数值积分相对精度
    quad_limit: int = 200            # 数值积分子区间上限
    mc_chunk_size: int = 1_000_000   # 蒙特卡洛分块大小

    # 估计量诊断配置
    eta_regime_low: float = 0.5      # η̂ 工作区间下界
    eta_regime_high: float = 1.0     # η̂ 工作区间上界
    xi_low_m_warning: float = 2.0    # k²/n 低于该值时告警

    # 命令行默认值
    default_seed: int = 20240101
    default_rolling_window: int = 1500
    default_rolling_step: int = 21   # 约一个交易月
    float_significant_digits: int = 17

    # 日志配置
    log_level: str = "INFO"
    log_format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = False


# 全局配置实例
settings = Settings()
