"""
Learning under bounded noise and a small tail
=============================================

Labels carry uniform noise of size eps and the target has extra small terms
of total mass nu. The learner keeps samples near the top value and solves a
denoising program; the L2 error stays a small multiple of eps + nu.
"""

import numpy as np

from boolsketch import LearnConfig, NoiseSpec, learn_bool_noisy, polynomial_oracle, separated_polynomial, tail_polynomial

eps = nu = 0.05
rng = np.random.default_rng(3)
f = separated_polynomial(rng, 20, 2, mu=4 * (eps + nu))
tail = tail_polynomial(rng, 20, 8, nu, exclude=f.terms)
noise = NoiseSpec(eps, nu, tail)

errors = []
for seed in range(10):
    out = learn_bool_noisy(polynomial_oracle(f, noise, seed=seed), LearnConfig(s=2, m=4000, noise=noise))
    errors.append(out.v_opt.l2_distance(f))

# %%
print("L2 errors:", np.round(errors, 3))
print("bound 13 (eps + nu) =", 13 * (eps + nu))
