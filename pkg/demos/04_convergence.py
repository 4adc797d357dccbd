# %% [markdown]
# # Random spectra converge to the free laws
#
# Empirical spectra of Haar-random pairs approach the limit law as the
# dimension grows with k/n and l/n held fixed.

# %%
from freeangles import ExperimentConfig, convergence_report, empirical_spectrum, ks_distance, uniform_angle_law
from freeangles.montecarlo import EmpiricalDistribution

base = ExperimentConfig(n=100, k=30, l=60, trials=2, seed=1, target="sum")
print(convergence_report(base, [100, 400, 1600], 0.3, 0.6).to_csv())

# %% [markdown]
# Half-dimensional subspaces meet at nearly uniform angles. With each of the
# `half` angles weighted 1/half the reference is the uniform probability law
# on [0, pi/2].

# %%
half = 1000
emp = empirical_spectrum(ExperimentConfig(n=2 * half, k=half, l=half, seed=6, target="angles"))
print("KS:", ks_distance(EmpiricalDistribution(emp.samples, 1 / half), uniform_angle_law()))
