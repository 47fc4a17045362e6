"""Tensoring with a constant channel turns f into a new convex function g.

If the output is sigma (x) diag(mu), then Tr f of it equals Tr g(sigma) with
g(x) = sum_j f(mu_j x). This is how non-additivity for one kink moves to a
smaller kink threshold.
"""

import numpy as np

from addlab.channels import ChannelPair, depolarizing, tensor, werner_holevo
from addlab.experiments import additivity_gap
from addlab.functions import Kink, mu_transform
from addlab.optimize import OptimizerConfig

t, t_big = 0.1, 0.3
n = int(np.ceil((1 - t / t_big) / t))
mu = np.r_[t / t_big, np.full(n, (1 - t / t_big) / n)]
g = mu_transform(Kink(t), mu)
x = np.linspace(0.4, 1.0, 7)
print("mu =", np.round(mu, 4))
print("g(x) / Kink(0.3)(x) on x > 0.3:", np.round(g(x) / Kink(t_big)(x), 12))

cfg = OptimizerConfig(restarts=4)
bare = additivity_gap(Kink(t), ChannelPair(werner_holevo(3), werner_holevo(3)), cfg)
lifted = additivity_gap(Kink(t), ChannelPair(tensor(werner_holevo(3), depolarizing(np.diag(mu), d_in=1)),
                                             werner_holevo(3)), cfg)
print(f"kink:{t} on the bare pair:   gap {bare.gap:.2e}  {bare.verdict.value}")
print(f"kink:{t} on the lifted pair: gap {lifted.gap:.2e}  {lifted.verdict.value}")
