# %% [markdown]
# # Triangle-free witnesses and binary code graphs

# %%
from ffgraphs.combinat import chromatic_exact, count_triangles, independence_exact, ramsey_witness
from ffgraphs.graphs import build_alon_graph, build_code_graph
from ffgraphs.spectral import certify

w5 = ramsey_witness(5)
w5.to_dict()

# %% [markdown]
# For q = 17 the independence number is bounded by the spectrum, n lambda / d.

# %%
w17 = ramsey_witness(17)
{k: w17.to_dict()[k] for k in ("n", "d", "lambda", "alpha_kind", "alpha_value", "ramsey_statement")}

# %% [markdown]
# q = 7 passes the congruence test but the graph has triangles, so the
# witness comes back marked invalid.

# %%
w7 = ramsey_witness(7, exact_alpha=False)
w7.triangle_count, w7.valid

# %% [markdown]
# ## Dual-BCH graphs
#
# 2k-bit vectors, u ~ v iff u + v = (z, z^3).  Triangle-free and
# (2^k - 1)-regular.

# %%
G = build_code_graph(3)
print(G, count_triangles(G), certify(G).lam)
print(independence_exact(G), chromatic_exact(G))

# %%
A = build_alon_graph(2)
A.family_tag
