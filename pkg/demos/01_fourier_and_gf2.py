"""
Fourier coefficients and GF(2) solution sets
============================================

A sparse polynomial over {-1, 1}^n is stored as a map from parity bitmasks to
coefficients. On small n the full Walsh-Hadamard transform gives it back.
"""

import numpy as np

from boolsketch import SparsePolynomial, brute_force_wht, has_unique_sign_property, solve_affine_all, truth_table

# f(x) = 2 x1 + 3 x2 - x1 x3 on four variables
f = SparsePolynomial.from_sets(4, [([1], 2.0), ([2], 3.0), ([1, 3], -1.0)])
print("f =", f.to_json())

# %%
# The truth table holds f at all 16 points; the transform recovers f exactly.
table = truth_table(f)
g = brute_force_wht(table)
print("max value", table.max(), "recovered", g.to_json())
print("unique maximizing sign pattern:", has_unique_sign_property(f))

# %%
# Every solution of a GF(2) system, with a cap instead of silent truncation.
A = np.array([[1, 1, 0, 0], [0, 1, 1, 0]])
sols = solve_affine_all(A, [1, 0], cap=16)
print("solutions of A p = (1, 0):", [format(p, "04b")[::-1] for p in sols])
