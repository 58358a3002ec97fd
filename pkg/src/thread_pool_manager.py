"""
线程池管理器
用于并行执行蒙特卡洛重复实验、网格单元与滚动窗口
结果始终按任务提交顺序返回，与并行度无关
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional

from .utils import logger
from .config import settings


class ThreadPoolManager:
    """线程池管理器"""

    def __init__(self, max_workers: Optional[int] = None, enabled: Optional[bool] = None):
        """
        初始化线程池管理器

        Args:
            max_workers: 最大工作线程数，默认从配置读取
            enabled: 是否启用多线程，默认从配置读取
        """
        self.max_workers = max_workers or settings.max_concurrent_threads
        self.timeout = settings.thread_pool_timeout
        self.enabled = settings.enable_threading if enabled is None else enabled

        logger.debug(f"线程池管理器初始化 - 最大线程数: {self.max_workers}, 超时时间: {self.timeout}s, 启用状态: {self.enabled}")

    @staticmethod
    def _run_one(task_func: Callable, task: Dict[str, Any]) -> Dict[str, Any]:
        """执行单个任务，异常转为失败记录"""
        task_id = task.get("task_id", "unknown")
        try:
            return {"task_id": task_id, "success": True, "result": task_func(task)}
        except Exception as e:
            logger.error(f"任务执行失败: {task_id}, 错误: {e}")
            error = e.to_dict() if hasattr(e, "to_dict") else {"error_code": "UNKNOWN_ERROR", "message": str(e)}
            return {"task_id": task_id, "success": False, "error": error}

    def execute_tasks_parallel(self, tasks: List[Dict[str, Any]],
                               task_func: Callable,
                               max_workers: Optional[int] = None) -> List[Dict[str, Any]]:
        """
        并行执行多个任务

        Args:
            tasks: 任务列表，每个任务包含task_id和其他参数
            task_func: 执行任务的函数
            max_workers: 最大并发数，默认使用配置值

        Returns:
            与 tasks 一一对应、顺序一致的结果记录列表
        """
        workers = min(max_workers or self.max_workers, len(tasks))
        if not self.enabled or workers <= 1:
            logger.debug(f"串行执行 {len(tasks)} 个任务")
            return [self._run_one(task_func, task) for task in tasks]

        logger.debug(f"并行执行 {len(tasks)} 个任务，使用 {workers} 个线程")
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="covar-worker") as executor:
            futures = [executor.submit(self._run_one, task_func, task) for task in tasks]
            # 按提交顺序收集
            return [future.result(timeout=self.timeout) for future in futures]

    def get_status(self) -> Dict[str, Any]:
        """获取线程池状态"""
        return {
            "enabled": self.enabled,
            "max_workers": self.max_workers,
            "timeout": self.timeout,
        }


# 全局线程池管理器实例
thread_pool_manager = ThreadPoolManager()
