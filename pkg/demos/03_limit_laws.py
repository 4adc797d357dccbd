# %% [markdown]
# # Limit laws of free projections
#
# For projections of traces a and b in free position the spectra of pqp,
# p + q, i(pq - qp) and pq + qp have explicit laws: atoms plus a density.

# %%
import numpy as np

from freeangles import (
    anticommutator_law,
    anticommutator_law_half,
    arcsine_law,
    boxplus_bernoulli,
    boxtimes_bernoulli,
    commutator_law,
    p_plus_qpq_law,
    p_plus_qpq_pushforward,
)

a, b = 0.3, 0.6
for law in (boxtimes_bernoulli(a, b), boxplus_bernoulli(a, b), commutator_law(a, b), anticommutator_law(a, b)):
    print(f"{law.name:16s} atoms={[(round(x, 3), round(m, 3)) for x, m in law.atoms]} "
          f"ac mass={law.ac_part().total_mass:.6f} mean={law.mean():.6f}")
print("expected means: pqp", a * b, " p+q", a + b)

# %% [markdown]
# At a = b = 1/2 the sum law is the arcsine law on [0, 2].

# %%
x = np.linspace(0, 2, 9)
print(np.max(np.abs(boxplus_bernoulli(0.5, 0.5).cdf(x) - arcsine_law(0, 2).cdf(x))))

# %% [markdown]
# Two independent derivations of the same law agree: the anticommutator law
# as an explicit density and as the pushforward of the sum law under
# t -> t^2 - t; and the p + qpq law both ways.

# %%
x = np.linspace(-0.3, 2.1, 50)
print("pq+qp:", np.max(np.abs(anticommutator_law_half().cdf(x) - anticommutator_law(0.5, 0.5).cdf(x))))
print("p+qpq:", np.max(np.abs(p_plus_qpq_law().cdf(x) - p_plus_qpq_pushforward().cdf(x))))

# %% [markdown]
# Laws can be sampled by inverse CDF.

# %%
s = p_plus_qpq_law().sample(5, seed=1)
print(np.round(s, 4))
