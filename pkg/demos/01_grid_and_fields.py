# %% [markdown]
# # Grids, transforms and field files
#
# A `GridSpec` is a periodic box [-L, L)^n.  Its forward transform is
# normalized to approximate the continuum Fourier integral, so analytic
# transforms can be compared directly.

# %%
import math
import tempfile
from pathlib import Path

import numpy as np

from inls_lab import SpectralField, dilate, dump_field, hs_norm, load_field, lp_norm, make_grid

g = make_grid(1, 512, 20.0)
f = SpectralField(g, np.exp(-g.x[0] ** 2))
print("||f||_2          ", lp_norm(f, 2), " exact", (math.pi / 2) ** 0.25)
print("max |hat f - ref|", np.abs(f.hat - math.sqrt(math.pi) * np.exp(-g.xi1d**2 / 4)).max())

# %% [markdown]
# Sobolev norms are weighted sums over the frequency lattice.  The
# homogeneous H^1 seminorm squared of exp(-x^2) is sqrt(pi/2).

# %%
print("|f|_{H^1}^2      ", hs_norm(f, 1, homogeneous=True) ** 2, " exact", math.sqrt(math.pi / 2))

# %% [markdown]
# Dyadic dilation f -> lam^a f(lam x) is done on the frequency side, which is
# exact for localized band-limited data.

# %%
wide = make_grid(1, 2048, 40.0)
h4 = SpectralField(wide, (wide.x[0] ** 4 - 6 * wide.x[0] ** 2 + 3) * np.exp(-wide.x[0] ** 2 / 2))
d = dilate(h4, 4, amplitude_power=0.5)
ref = 2.0 * ((4 * wide.x[0]) ** 4 - 6 * (4 * wide.x[0]) ** 2 + 3) * np.exp(-(4 * wide.x[0]) ** 2 / 2)
print("dilation error   ", np.abs(d.values - ref).max())

# %% [markdown]
# Field dumps: one JSON header line, then little-endian float64 (re, im) pairs.

# %%
with tempfile.TemporaryDirectory() as tmp:
    p = Path(tmp) / "gauss.bin"
    dump_field(f, p)
    print(p.read_bytes().split(b"\n", 1)[0].decode())
    print("round trip exact:", np.array_equal(load_field(p).values, f.values))
