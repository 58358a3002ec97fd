"""
模型 2 预设
Pareto(3) 边际 + Marshall-Olkin 生存 copula，a1 = a2 = 7/10
"""

MODEL_CONFIG = {
    "name": "模型 2",
    "description": "Marshall-Olkin 生存 copula，a1 = a2",
    "variant": "marshall_olkin",
    "params": {"a": 3.0, "a1": 0.7, "a2": 0.7},

    "table": [
        {"n": 500, "tau_prime": 0.99, "k": 84, "k1": 150,
         "msre": {"covar_i": 0.04611, "covar_ii": 0.04674, "coes_i": 0.06538, "coes_ii": 0.06568, "coes_iii": 0.09129}},
        {"n": 500, "tau_prime": 0.999, "k": 84, "k1": 150,
         "msre": {"covar_i": 0.12010, "covar_ii": 0.11969, "coes_i": 0.15608, "coes_ii": 0.15492, "coes_iii": 0.19471}},
        {"n": 1000, "tau_prime": 0.99, "k": 182, "k1": 274,
         "msre": {"covar_i": 0.02491, "covar_ii": 0.02537, "coes_i": 0.03507, "coes_ii": 0.03552, "coes_iii": 0.04136}},
        {"n": 1000, "tau_prime": 0.999, "k": 182, "k1": 274,
         "msre": {"covar_i": 0.06311, "covar_ii": 0.06375, "coes_i": 0.08059, "coes_ii": 0.08129, "coes_iii": 0.08826}},
        {"n": 2000, "tau_prime": 0.99, "k": 274, "k1": 384,
         "msre": {"covar_i": 0.01596, "covar_ii": 0.01629, "coes_i": 0.02237, "coes_ii": 0.02269, "coes_iii": 0.02830}},
        {"n": 2000, "tau_prime": 0.999, "k": 305, "k1": 384,
         "msre": {"covar_i": 0.04026, "covar_ii": 0.04087, "coes_i": 0.05087, "coes_ii": 0.05149, "coes_iii": 0.05639}},
        {"n": 5000, "tau_prime": 0.99, "k": 697, "k1": 697,
         "msre": {"covar_i": 0.00755, "covar_ii": 0.00778, "coes_i": 0.01074, "coes_ii": 0.01098, "coes_iii": 0.01377}},
        {"n": 5000, "tau_prime": 0.999, "k": 592, "k1": 750,
         "msre": {"covar_i": 0.01906, "covar_ii": 0.01940, "coes_i": 0.02391, "coes_ii": 0.02425, "coes_iii": 0.02933}},
    ],
}
