"""
插件系统模块
用于管理和加载模拟模型预设
"""

from .plugin_manager import PluginManager

__all__ = ['PluginManager']
