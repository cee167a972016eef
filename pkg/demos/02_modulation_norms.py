# %% [markdown]
# # Frequency-uniform blocks and modulation norms
#
# Blocks sit at integer frequencies in cycles (angular 2 pi k).  The
# windows form an exact partition of unity on the grid.

# %%
import numpy as np

from inls_lab import ModulationParams, WindowFamily, block, lp_norm, mod_norm, stft_norm
from inls_lab.corpus import corpus, default_grid

g = default_grid(1)
w = WindowFamily(g)
print("active blocks", len(w), "partition error", w.partition_error())

# %% [markdown]
# Reconstruction from blocks, and how the mass of a chirp spreads across them.

# %%
members = dict(corpus(g))
f = members["chirp0"]
parts = [block(f, k, w) for k in w.indices]
print("sum of blocks - f:", lp_norm(sum(parts[1:], parts[0]) - f, 2))
for k, part in zip(w.indices, parts):
    n2 = lp_norm(part, 2)
    if n2 > 1e-3:
        print(f"  k={k[0]:+d}  ||Box_k f||_2 = {n2:.4f}")

# %% [markdown]
# The block norm and the Gaussian-window STFT norm are equivalent; for
# p = q = 2 the STFT norm is exactly the L^2 norm.

# %%
for p, q in [(2, 2), (3, 1.5), (4, 2)]:
    mp = ModulationParams(p, q)
    print(f"(p,q)=({p},{q})  M-norm {mod_norm(f, mp, w):.5f}  STFT {stft_norm(f, mp, stride=2):.5f}  "
          f"L^p {lp_norm(f, p):.5f}")
