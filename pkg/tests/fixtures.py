"""Frozen reference values of the exclusion SDP.

Equiangular values came from an independent interior-point solve (SCS at
eps 1e-10) of the Gram-form problem; the perturbed four-state values from
the same solver applied to the POVM form of the problem, which is better
conditioned for a singular Gram matrix. Both were computed once and frozen.
"""

# (n, gamma) -> optimal sum_i <i|F_i|i> for I + gamma (11^T - I)
EQUIANGULAR_VALUES = {
    (3, 0.75): 0.11257411326567375,
    (3, 0.9): 0.3611329835692916,
    (3, 0.99): 0.7764976466444434,
    (4, 0.75): 0.0229182717165337,
    (4, 0.9): 0.23758562044570228,
    (4, 0.99): 0.716127117294233,
    (5, 0.8): 0.01357577761412013,
    (5, 0.95): 0.3361632823093824,
    (6, 0.9): 0.0973002521297266,
    (8, 0.9): 0.029799344555595863,
    (8, 0.95): 0.18018477327601284,
    (10, 0.95): 0.11617525350245535,
    (10, 0.99): 0.5053572554230379,
}

# eps -> optimal value for the perturbed four-state Gram matrix G_eps
D4_VALUES = {
    0.01: 0.00016386902233678832,
    0.05: 0.005032235840594755,
    0.09: 0.020670319337167255,
}

VALUE_TOL = 1e-5
