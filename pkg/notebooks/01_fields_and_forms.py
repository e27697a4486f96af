# %% [markdown]
# # Finite fields and quadratic forms
#
# Every element of GF(p^r) is stored as the integer whose base-p digits are
# its polynomial coefficients.  That makes vertex numbering canonical for all
# the graphs built later.

# %%
from ffgraphs.ffield import ext_field, make_field
from ffgraphs.qforms import form_summary, forms_for_dim, make_form, sphere_table

F9 = make_field(3, 2)
print(F9.summary())

# %% [markdown]
# Multiplication in GF(9) with modulus t^2 + 1: t * t = -1 = 2.

# %%
t = F9.from_digits((0, 1))
print(F9.digits(F9.mul(t, t)))

# %% [markdown]
# ## Forms and sphere sizes
#
# Over odd q each dimension has two inequivalent non-degenerate forms.  The
# number of solutions of Q(x) = a is one of q^{d-1} +- q^{floor((d-1)/2)}.

# %%
F7 = make_field(7)
for Q in forms_for_dim(F7, 2) + forms_for_dim(F7, 3):
    print(Q.kind, Q.dim, Q.describe(), sphere_table(Q).tolist())

# %%
form_summary(make_form(make_field(3), "minus_even", 2))

# %% [markdown]
# ## The quadratic extension
#
# With sigma a non-square, GF(q^2) = GF(q)(sqrt(sigma)); the norm is
# multiplicative and equals z^{1+q}.

# %%
E = ext_field(make_field(5))
z = (2, 3)
print(E.norm(z), E.pow(z, 6))
