# %% [markdown]
# # Exact spectra from principal angles
#
# Two projections P, Q decompose the space into 2x2 blocks, one per nonzero
# principal angle, plus 1x1 blocks where (P, Q) acts as (1,1), (1,0), (0,1)
# or (0,0). Any polynomial in P and Q acts block-wise, so its spectrum only
# needs the angles and the block counts.

# %%
import numpy as np

from freeangles import (
    block_structure,
    evaluate,
    exact_spectrum,
    haar_subspace,
    parse_ncpoly,
    principal_angles,
    projector,
    spectrum_anticommutator,
    spectrum_pqp,
)

n, k, l = 60, 25, 40
E, F = haar_subspace(n, k, 1), haar_subspace(n, l, 2)
blocks = block_structure(n, k, l, principal_angles(E, F))
print(blocks)

# %% [markdown]
# Closed forms against a dense eigensolver.

# %%
PE, PF = projector(E), projector(F)
dense = np.linalg.eigvalsh(PE @ PF @ PE)
print("pqp max error:", np.max(np.abs(spectrum_pqp(blocks).values() - dense)))
dense = np.linalg.eigvalsh(PE @ PF + PF @ PE)
print("pq+qp max error:", np.max(np.abs(spectrum_anticommutator(blocks).values() - dense)))

# %% [markdown]
# Any self-adjoint polynomial given as text, here a degree-4 one.

# %%
poly = parse_ncpoly("p*q*p*q + q*p*q*p")
ex = exact_spectrum(poly, blocks)
M = evaluate(poly, PE, PF)
print("degree-4 max error:", np.max(np.abs(ex.values() - np.linalg.eigvalsh(M))))
print("distinct eigenvalues with multiplicity > 1:",
      [(round(float(v), 6), int(m)) for v, m in zip(ex.eigenvalues, ex.multiplicities) if m > 1])
