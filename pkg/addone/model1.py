"""
模型 1 预设
Pareto(3) 边际 + Marshall-Olkin 生存 copula，a1 = 5/6，a2 = 2/3
γ₁ = 1/3，η = 3/4，C(x, y) = x·y^{1/3}
"""

MODEL_CONFIG = {
    "name": "模型 1",
    "description": "Marshall-Olkin 生存 copula，a1 > a2",
    "variant": "marshall_olkin",
    "params": {"a": 3.0, "a1": 5.0 / 6.0, "a2": 2.0 / 3.0},

    # MSRE 表：(n, τ′) -> 选定的 (k, k1) 与 N=1000 次重复下的 MSRE，k2 = k1
    "table": [
        {"n": 500, "tau_prime": 0.99, "k": 137, "k1": 143,
         "msre": {"covar_i": 0.04118, "covar_ii": 0.04117, "coes_i": 0.06155, "coes_ii": 0.06146, "coes_iii": 0.06520}},
        {"n": 500, "tau_prime": 0.999, "k": 137, "k1": 143,
         "msre": {"covar_i": 0.11382, "covar_ii": 0.11341, "coes_i": 0.15278, "coes_ii": 0.15231, "coes_iii": 0.15578}},
        {"n": 1000, "tau_prime": 0.99, "k": 287, "k1": 274,
         "msre": {"covar_i": 0.02043, "covar_ii": 0.02017, "coes_i": 0.02937, "coes_ii": 0.02899, "coes_iii": 0.03273}},
        {"n": 1000, "tau_prime": 0.999, "k": 287, "k1": 274,
         "msre": {"covar_i": 0.05298, "covar_ii": 0.05227, "coes_i": 0.06803, "coes_ii": 0.06714, "coes_iii": 0.07246}},
        {"n": 2000, "tau_prime": 0.99, "k": 384, "k1": 400,
         "msre": {"covar_i": 0.01386, "covar_ii": 0.01423, "coes_i": 0.01987, "coes_ii": 0.02028, "coes_iii": 0.02251}},
        {"n": 2000, "tau_prime": 0.999, "k": 195, "k1": 400,
         "msre": {"covar_i": 0.03878, "covar_ii": 0.03908, "coes_i": 0.04873, "coes_ii": 0.04896, "coes_iii": 0.06612}},
        {"n": 5000, "tau_prime": 0.99, "k": 671, "k1": 724,
         "msre": {"covar_i": 0.00708, "covar_ii": 0.00727, "coes_i": 0.01015, "coes_ii": 0.01034, "coes_iii": 0.01572}},
        {"n": 5000, "tau_prime": 0.999, "k": 671, "k1": 724,
         "msre": {"covar_i": 0.01886, "covar_ii": 0.01908, "coes_i": 0.02396, "coes_ii": 0.02418, "coes_iii": 0.03072}},
    ],
}
