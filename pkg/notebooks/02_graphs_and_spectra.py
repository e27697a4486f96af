# %% [markdown]
# # Euclidean and half-plane graphs, and their spectra
#
# E_q(d, Q, a) joins x and y when Q(x - y) = a.  Because it is a Cayley graph
# of the additive group, its eigenvalues are character sums, which gives an
# oracle independent of the dense eigensolver.

# %%
import numpy as np

from ffgraphs.combinat import count_triangles, spectral_bounds
from ffgraphs.ffield import make_field
from ffgraphs.graphs import build_euclidean, build_halfplane, halfplane_ext
from ffgraphs.qforms import make_form
from ffgraphs.spectral import certify, mixing_audit, spectrum_charsum, spectrum_dense

Q = make_form(make_field(7), "minus_even", 2)
G = build_euclidean(Q, 1)
dense = spectrum_dense(G)
chars = spectrum_charsum(Q, 1)
print(G, dense.groups())
print("oracles agree:", dense.matches(chars))

# %% [markdown]
# The certificate compares the largest non-trivial |eigenvalue| with 2q^{(d-1)/2}.

# %%
cert = certify(G)
cert.to_dict()

# %% [markdown]
# ## Half-plane graphs
#
# Points x + y sqrt(sigma) with y != 0, joined at Poincare distance a.  For
# a not in {0, 4 sigma} they are (q+1)-regular with lambda <= 2 sqrt(q); at
# a = 4 sigma they collapse to a perfect matching.

# %%
ext = halfplane_ext(7)
for a in range(1, 7):
    H = build_halfplane(ext, a)
    print(a, H.family_tag["special"], H.valency(), round(certify(H).lam, 6))

# %% [markdown]
# ## Mixing
#
# Random vertex sets obey |e(B, C) - d|B||C|/n| <= lambda sqrt(|B||C|).

# %%
H = build_halfplane(ext, 1)
mixing_audit(H, certify(H), trials=500, seed=0)

# %%
spectral_bounds(certify(H)).to_dict()

# %% [markdown]
# ## Triangles
#
# The plus-type plane graph is triangle-free exactly when -3 is a non-square.

# %%
for q in (5, 7, 11, 13):
    F = make_field(q)
    print(q, [count_triangles(build_euclidean(make_form(F, k, 2), 1)) for k in ("plus_even", "minus_even")])
