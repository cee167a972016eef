# %% [markdown]
# # The exponent report
#
# `derive_all` evaluates every exponent and hypothesis for (n, alpha, b, p, N).
# Hypothesis violations raise `HypothesisError` listing each failed inequality.

# %%
from inls_lab import HypothesisError, ProblemParams, derive_all

rep = derive_all(ProblemParams(1, 1.0, 0.1, p=2.05, N=8), norms={"u0": 1.2, "phi": 1.1, "psi": 0.1})
print(rep.table())

# %% [markdown]
# The admissible range of p shrinks as b grows; at the endpoint b = b_tilde
# in one dimension the second Strichartz pair has rho2 = infinity.

# %%
for b in (0.02, 0.08, 0.14, 0.177):
    r = derive_all(ProblemParams(1, 1.0, b))
    print(f"b={b:<6} p_max={r.p_max:.6f} branch={r.branch:<9} rho2={r.rho2:.4g}")

# %%
try:
    derive_all(ProblemParams(2, 1.5, 0.7, p=2.5))
except HypothesisError as e:
    for d in e.diagnostics:
        print("violation:", d)
