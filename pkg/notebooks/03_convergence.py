# %% [markdown]
# # Temporal order
#
# Halve the step four times and compare with a run on a finer step.
# Observed orders should sit near 2.

# %%
from macsplit import build_config, convergence_study
from macsplit.spectral import SpectralPlan

cfg = build_config("converge-default")
u0 = cfg.initial_field()
rows = convergence_study(u0, cfg.params(), cfg.tmax, cfg.levels, SpectralPlan(u0.grid))

for r in rows:
    print(f"tau={r.tau:<8g} error={r.error:.3e}  order={r.order:.3f}")
