"""
CoVaR/CoES 极值外推估计包
尾部渐近独立下的极端水平 CoVaR、CoES 估计、模拟基准与滚动窗口分析
"""

__version__ = "1.0.0"
__author__ = "CoVaR Extrapolator Team"
__description__ = "尾部渐近独立下的 CoVaR/CoES 极值外推估计器"
