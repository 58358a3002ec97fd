"""
模型 3 预设
(X, Y) = B(Z1, Z3) + (1-B)(Z2, Z2)，Z1, Z3 ~ Pareto(3)，Z2 ~ Pareto(4)
γ₁ = 1/3，η = 3/4，C(x, y) = 2^{1/3}(x∧y)^{4/3}
"""

MODEL_CONFIG = {
    "name": "模型 3",
    "description": "Pareto 混合模型",
    "variant": "pareto_mixture",
    "params": {"a": 3.0, "b": 4.0},

    "table": [
        {"n": 500, "tau_prime": 0.99, "k": 71, "k1": 137,
         "msre": {"covar_i": 0.03838, "covar_ii": 0.03907, "coes_i": 0.06532, "coes_ii": 0.06592, "coes_iii": 0.08949}},
        {"n": 500, "tau_prime": 0.999, "k": 124, "k1": 150,
         "msre": {"covar_i": 0.09767, "covar_ii": 0.09747, "coes_i": 0.15209, "coes_ii": 0.15099, "coes_iii": 0.14587}},
        {"n": 1000, "tau_prime": 0.99, "k": 155, "k1": 287,
         "msre": {"covar_i": 0.01945, "covar_ii": 0.02026, "coes_i": 0.03578, "coes_ii": 0.03694, "coes_iii": 0.04587}},
        {"n": 1000, "tau_prime": 0.999, "k": 116, "k1": 300,
         "msre": {"covar_i": 0.04618, "covar_ii": 0.04839, "coes_i": 0.07214, "coes_ii": 0.07534, "coes_iii": 0.08829}},
        {"n": 2000, "tau_prime": 0.99, "k": 274, "k1": 384,
         "msre": {"covar_i": 0.01650, "covar_ii": 0.01635, "coes_i": 0.03475, "coes_ii": 0.03425, "coes_iii": 0.03193}},
        {"n": 2000, "tau_prime": 0.999, "k": 274, "k1": 384,
         "msre": {"covar_i": 0.04263, "covar_ii": 0.04225, "coes_i": 0.07509, "coes_ii": 0.07424, "coes_iii": 0.06861}},
        {"n": 5000, "tau_prime": 0.99, "k": 382, "k1": 724,
         "msre": {"covar_i": 0.00947, "covar_ii": 0.01020, "coes_i": 0.02247, "coes_ii": 0.02368, "coes_iii": 0.02445}},
        {"n": 5000, "tau_prime": 0.999, "k": 250, "k1": 750,
         "msre": {"covar_i": 0.02325, "covar_ii": 0.02569, "coes_i": 0.04380, "coes_ii": 0.04815, "coes_iii": 0.05687}},
    ],
}
