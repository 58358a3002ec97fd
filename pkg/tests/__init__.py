"""
CoVaR 外推估计器测试包
"""
