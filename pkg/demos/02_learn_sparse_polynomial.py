"""
Learning a sparse polynomial from random samples
================================================

The learner looks only at the samples where f takes its largest value,
lists every parity that is constant on them, then fits the coefficients
with L1 minimization over that short candidate list.
"""

import numpy as np

from boolsketch import LearnConfig, learn_bool, planted_polynomial, polynomial_oracle

rng = np.random.default_rng(0)
f = planted_polynomial(rng, n=30, s=3, condition="positive")
print("planted:", f.to_json()["terms"])

oracle = polynomial_oracle(f, seed=1)
out = learn_bool(oracle, LearnConfig(s=3, m=256))

# %%
# Candidate list size, sample counts and the recovered polynomial.
d = out.diagnostics
print("candidates:", len(out.candidates), "from", d["n_max"], "max rows")
print("samples used:", d["samples_total"])
print("learned:", out.v_opt.to_json()["terms"])
print("max coefficient error:", out.v_opt.max_abs_error(f))
