# %% [markdown]
# # Principal angles between random subspaces
#
# Two subspaces of dimensions k and l in an n-dimensional space meet at
# min(k, l) principal angles. Their cosines are the singular values of the
# cross-Gram matrix of orthonormal bases.

# %%
import numpy as np

from freeangles import haar_subspace, planted_pair, principal_angles, principal_vectors, rng_stream

rng = rng_stream(seed=7)
E = haar_subspace(10, 7, rng)
F = haar_subspace(10, 8, rng)
spec = principal_angles(E, F)
print("angles:", np.round(spec.angles, 4))
print("dim(E n F) =", spec.dim_intersection, "(k + l - n = 5 generically)")

# %% [markdown]
# Principal vectors realise the angles: the Gram matrix between the two
# rotated bases is diagonal with the cosines on the diagonal.

# %%
pv = principal_vectors(haar_subspace(40, 10, 1), haar_subspace(40, 15, 2))
G = pv.gram()  # 10 x 15
target = np.zeros(G.shape)
np.fill_diagonal(target, np.cos(pv.angles.angles))
print("Gram pattern error:", float(np.max(np.abs(G - target))))

# %% [markdown]
# A planted pair has prescribed angles, including the endpoints 0 and pi/2.

# %%
target = [0.0, 0.25, 1.0, np.pi / 2]
E, F = planted_pair(12, target, extra_e=0, extra_f=2, seed=3)
print("planted:  ", np.round(target, 12))
print("recovered:", np.round(principal_angles(E, F).angles, 12))

# %% [markdown]
# Complex subspaces work the same way.

# %%
Ec, Fc = haar_subspace(30, 6, 11, "complex"), haar_subspace(30, 9, 12, "complex")
print("complex angles:", np.round(principal_angles(Ec, Fc).angles, 4))
