# %% [markdown]
# # Histogram of P + QPQ with the limit density
#
# Writes an SVG plus the CSV pair behind it to ./demo_output/.

# %%
from pathlib import Path

from freeangles import ExperimentConfig, empirical_spectrum, p_plus_qpq_law, w1_distance
from freeangles.figure import FigureSpec, write_figure

emp = empirical_spectrum(ExperimentConfig(n=2000, k=1000, l=1000, seed=1, target="p_plus_qpq"))
law = p_plus_qpq_law()
print("W1 to the limit law:", w1_distance(emp, law))

out = Path("demo_output")
out.mkdir(exist_ok=True)
spec = FigureSpec.build(emp, law, bins=80, title="Eigenvalues of P + QPQ, n = 2000, k = l = 1000")
for path in write_figure(spec, out / "p_plus_qpq.svg"):
    print("wrote", path)
