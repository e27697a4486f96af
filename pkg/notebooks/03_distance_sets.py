# %% [markdown]
# # Distance sets
#
# For E in GF(q)^d, Delta(E) = {Q(x - y) : x, y in E}.  Large sets must see
# many distances; the isotropic line of the plus form shows that size
# q^{d/2} alone is not enough.

# %%
from ffgraphs.distance import (
    EuclideanSpace,
    ExperimentConfig,
    PointSet,
    distance_set,
    distance_set_halfplane,
    matching_extremal_set,
    run_experiment,
    verify_lemma_mechanisms,
)
from ffgraphs.ffield import make_field
from ffgraphs.graphs import halfplane_ext
from ffgraphs.qforms import make_form

Q = make_form(make_field(7), "plus_even", 2)
space = EuclideanSpace(Q)
line = PointSet(space, [7 * t for t in range(7)])
distance_set(Q, line).to_dict()

# %% [markdown]
# In the half-plane, picking one endpoint of each edge of the 4 sigma matching
# gives (q^2 - q)/2 points that never realise 4 sigma.

# %%
ext = halfplane_ext(5)
E = matching_extremal_set(ext)
rep = distance_set_halfplane(ext, E)
print(len(E), rep.distance_set, E.space.four_sigma)

# %% [markdown]
# ## Seeded experiments
#
# Each trial draws its set from a generator seeded by SeedSequence([master,
# size, trial]), so any row can be reproduced alone.

# %%
cfg = ExperimentConfig(space="euclidean", q=7, sizes=[12, 25, 49], trials=50, seed=1)
report = run_experiment(cfg)
report.summary

# %%
print(report.to_csv()[:400])

# %% [markdown]
# ## The inequalities behind the distance theorems

# %%
out = verify_lemma_mechanisms(5, 2, samples=200)
out["all_hold"], out["rows"][0]
