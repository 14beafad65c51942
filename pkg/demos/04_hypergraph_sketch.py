"""
Recovering a hypergraph from cut queries
========================================

A query colours every vertex +1 or -1 and returns the number of edges that
are not monochromatic. That count is a sparse polynomial in the colours, so
the hypergraph can be read off a learned polynomial.
"""

import numpy as np

from boolsketch import Hypergraph, c_cut_polynomial, cut_oracle, edges_from_polynomial, learn_graph

G = Hypergraph.from_edges(200, [[3, 17, 42], [8, 9], [100, 101, 150, 199]])
p = c_cut_polynomial(G)
print("polynomial has", p.sparsity, "terms; constant", p.coefficient(0))
print("edges from polynomial match:", edges_from_polynomial(p, 4) == G)

# %%
res = learn_graph(cut_oracle(G, seed=0), s=3, d_hint=4)
print("queries:", res.diagnostics["m1"], "algorithm seconds:", round(res.diagnostics["timing"]["algorithm"], 4))
print("recovered edges:", res.edges.edge_list())
print("exact:", res.edges == G)

# %%
# Some edge sets share one cut function; the learner then reports all of them.
a = Hypergraph.from_edges(4, [[1, 4], [1, 2, 3], [2, 3, 4]], one_based=True)
b = Hypergraph.from_edges(4, [[2, 3], [1, 2, 4], [1, 3, 4]], one_based=True)
print("same polynomial:", c_cut_polynomial(a) == c_cut_polynomial(b))
