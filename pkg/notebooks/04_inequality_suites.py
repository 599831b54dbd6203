# %% [markdown]
# # Pointwise inequalities
#
# The energy argument rests on a handful of matrix inequalities. Each suite
# samples them at random and reports the tightest margin it saw.

# %%
from macsplit import checks

for res in checks.run_all(samples=20_000, seed=1):
    print(res.summary())

# %% [markdown]
# Margins close to zero are expected for the trace inequality: it is tight
# on diagonal matrices.
