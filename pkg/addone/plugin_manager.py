"""
插件管理器
负责加载和管理模拟模型预设插件
"""

import importlib.util
from typing import Dict, Any, List, Optional
from pathlib import Path
import logging

logger = logging.getLogger(__name__)


class PluginManager:
    """插件管理器"""

    def __init__(self, plugin_dir: str = None):
        """
        初始化插件管理器

        Args:
            plugin_dir: 插件目录路径，默认为当前文件所在的addone目录
        """
        self.plugin_dir = Path(__file__).parent if plugin_dir is None else Path(plugin_dir)
        self._plugins: Dict[str, Dict[str, Any]] = {}
        self._load_plugins()

    def _load_plugins(self):
        """加载所有插件"""
        if not self.plugin_dir.exists():
            logger.warning(f"插件目录不存在: {self.plugin_dir}")
            return

        for plugin_file in sorted(self.plugin_dir.glob("*.py")):
            if plugin_file.name.startswith("__") or plugin_file.stem == "plugin_manager":
                continue

            model_name = plugin_file.stem
            try:
                spec = importlib.util.spec_from_file_location(f"preset_{model_name}", plugin_file)
                if spec and spec.loader:
                    module = importlib.util.module_from_spec(spec)
                    spec.loader.exec_module(module)

                    if hasattr(module, 'MODEL_CONFIG'):
                        self._plugins[model_name] = module.MODEL_CONFIG
                        logger.debug(f"成功加载模型预设: {model_name}")
                    else:
                        logger.warning(f"插件 {model_name} 缺少 MODEL_CONFIG 配置")

            except Exception as e:
                logger.error(f"加载插件 {model_name} 失败: {str(e)}")

    def get_model_config(self, model_name: str) -> Optional[Dict[str, Any]]:
        """获取模型预设配置，不存在时返回None"""
        return self._plugins.get(model_name)

    def has_plugin(self, model_name: str) -> bool:
        """检查是否存在指定模型预设"""
        return model_name in self._plugins

    def list_plugins(self) -> List[str]:
        """列出所有可用的模型预设"""
        return list(self._plugins.keys())

    def reload_plugins(self):
        """重新加载所有插件"""
        self._plugins.clear()
        self._load_plugins()

    def get_model_params(self, model_name: str) -> Optional[Dict[str, Any]]:
        """
        获取构造 ModelSpec 所需的参数

        Returns:
            {"variant": ..., "a": ..., ...}，预设不存在时返回None
        """
        config = self.get_model_config(model_name)
        if config is None:
            return None
        return {"variant": config["variant"], **config["params"], "name": model_name}

    def get_table_entry(self, model_name: str, n: int, tau_prime: float) -> Optional[Dict[str, Any]]:
        """
        查找 MSRE 表中 (n, τ′) 对应的 (k, k1) 选择

        Returns:
            表项字典（含 k, k1, msre），未收录时返回None
        """
        config = self.get_model_config(model_name)
        if config is None:
            return None
        for entry in config.get("table", []):
            if entry["n"] == n and abs(entry["tau_prime"] - tau_prime) < 1e-12:
                return entry
        return None

    def get_plugin_info(self) -> Dict[str, Dict[str, Any]]:
        """获取所有插件的信息"""
        return self._plugins.copy()


# 全局插件管理器实例
plugin_manager = PluginManager()
