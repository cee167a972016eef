"""Independent reference evaluations used by the test suite.

Nothing here imports inls_lab: each oracle restates its formula from scratch
(high-precision arithmetic, quadrature or brute force) so agreement is a real
cross-check.
"""

from __future__ import annotations

import json
from pathlib import Path

import mpmath as mp
import numpy as np
from scipy import optimize

DATA = Path(__file__).parent / "data"

mp.mp.dps = 60


def frozen() -> dict:
    return json.loads((DATA / "frozen.json").read_text())


# ----------------------------------------------------------------- exponents

def exponents_mp(n, alpha, b, p=None, N=None, C=1, u0=None, psi=None):
    """All closed-form exponents at 60 digits, as mpf (mp.inf where infinite)."""
    n, a, b = mp.mpf(n), mp.mpf(alpha), mp.mpf(b)
    out = {}
    out["s_b"] = n / 2 - (2 - b) / a
    if n == 1:
        bt = (3 - mp.sqrt(7)) / 2
    elif n == 2:
        bt = 2 - mp.sqrt(2)
    else:
        bt = (n + 6 - mp.sqrt((n + 6) ** 2 - 32)) / 4
    out["b_tilde"] = bt
    out["gamma2"] = 4 * (n + 2 - b) / (2 * n + 4 * b + b * n - 2 * b**2)
    den = n**2 - 2 * n * b - 4 * b + 2 * b**2
    out["rho2"] = mp.inf if den == 0 else 2 * n * (n + 2 - b) / den
    d = 4 - 2 * b - n * a
    q1 = d / 4 - n * d / (4 * (n + 2 - b) * (a + 2))
    out["inv_q1"] = q1
    out["gamma1_conj"] = 4 * (a + 2) / (4 * (a + 2) - n * a)
    branch = a - n * a**2 / (4 * (a + 2)) - d / 4 + n * d / (4 * (a + 2) * (n + 2 - b))
    r = a + 2
    if branch > 0:
        eta = q1 / branch
        # p at which beta(p) = eta, solved directly from the beta formula
        pmax = (1 + eta) / (mp.mpf(1) / 2 + eta / r)
    else:
        eta, pmax = mp.inf, r
    out["eta"], out["p_max"] = eta, pmax
    out["c2_exponent"] = -a / q1
    out["c3_exponent"] = -a / (q1 + n * a**2 / (4 * (a + 2)))
    if p is not None:
        p = mp.mpf(p)
        beta = (mp.mpf(1) / 2 - 1 / p) / (1 / p - 1 / r)
        out["beta"] = beta
        if N is not None:
            T = (3 * C * mp.mpf(N) ** beta) ** (-a / q1)
            out["T_N"] = T
            if psi is not None:
                out["A"] = 3 / mp.mpf(C) * T ** (n * a / (4 * (a + 2))) * mp.mpf(psi)
    if u0 is not None:
        out["a"] = C * mp.mpf(u0)
        out["T_local"] = min(mp.mpf(1), C * mp.mpf(u0) ** (-a / q1))
    return out


def p_max_remark_form(n, alpha, b):
    """Second closed form 2 / (1 - 4 q1 / (4a + 8 - n a)) for the eta branch."""
    n, a, b = mp.mpf(n), mp.mpf(alpha), mp.mpf(b)
    d = 4 - 2 * b - n * a
    q1 = d / 4 - n * d / (4 * (n + 2 - b) * (a + 2))
    return 2 / (1 - 4 * q1 / (4 * a + 8 - n * a))


def valid_sweep(count=200, seed=20240601):
    """Random valid (n, alpha, b, p) with n in {1, 2, 3}."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(1, 4))
        bt = float(exponents_mp(n, 1, 0.1)["b_tilde"])
        b = float(rng.uniform(0.01, bt * 0.999))
        amax = (4 - 2 * b) / n
        a = float(rng.uniform(0.02, amax * 0.98))
        pmax = float(exponents_mp(n, a, b)["p_max"])
        p = float(rng.uniform(2.0, pmax))
        if not 2 < p < pmax:
            continue
        out.append((n, a, b, p))
    return out


# ------------------------------------------------------------ G-bound constant

def g_ratio(u, v, w, alpha):
    num = np.abs(np.abs(u + v) ** alpha * (u + v) - np.abs(u + w) ** alpha * (u + w))
    den = (np.abs(u) ** alpha + np.abs(v) ** alpha + np.abs(w) ** alpha) * np.abs(v - w)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(den > 0, num / den, 0.0)


def fit_g_constant(alpha, radii=25, angles=16):
    """sup of the G ratio over the unit polydisc: dense scan then Nelder-Mead.

    Radii are log-spaced down to 1e-6 because the supremum is approached
    only as |v|, |w| shrink relative to |u| (and v -> w).  u is taken real
    and nonnegative by gauge invariance.
    """
    r = np.concatenate([[0.0], np.logspace(-6, 0, radii)])
    th = np.linspace(0, 2 * np.pi, angles, endpoint=False)
    disc = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    vv, ww = np.meshgrid(disc, disc, indexing="ij")
    cands = []
    for u in r:
        rat = g_ratio(u, vv, ww, alpha)
        for i in np.argsort(rat, axis=None)[-3:]:
            j = np.unravel_index(i, rat.shape)
            cands.append((float(rat[j]), u, vv[j], ww[j]))
    cands.sort(key=lambda c: -c[0])
    best = cands[0][0]

    def neg(z):
        return -float(g_ratio(np.array(z[0]), np.array(z[1] + 1j * z[2]),
                              np.array(z[3] + 1j * z[4]), alpha))

    for _, u, v, w in cands[:3]:
        res = optimize.minimize(neg, [u, v.real, v.imag, w.real, w.imag], method="Nelder-Mead",
                                options={"xatol": 1e-14, "fatol": 1e-15, "maxiter": 4000})
        best = max(best, -res.fun)
    return best


def g_sup_closed_form(alpha):
    """(alpha+1) sup_t (1+t)^alpha / (t^alpha + 2): the Jacobian bound of |z|^a z, attained as v -> w."""
    f = lambda s: -((1 + np.exp(s)) ** alpha / (np.exp(s * alpha) + 2))
    grid = np.linspace(-20, 40, 6001)
    vals = -f(grid)
    s0 = grid[np.argmax(vals)]
    res = optimize.minimize_scalar(f, bracket=(s0 - 0.01, s0, s0 + 0.01)) if 0 < np.argmax(vals) < len(grid) - 1 else None
    top = max(vals.max(), -res.fun if res is not None else 0.0, 1.0)  # t -> inf limit is 1
    return (alpha + 1) * top


# ----------------------------------------------------------- energy reference

def gaussian_energy_reference(alpha, b, mu):
    """E for u = exp(-x^2) in 1-D: exact kinetic term, potential by quadrature."""
    kin = mp.sqrt(mp.pi / 2)
    pot = 2 * mp.quad(lambda x: x ** (-b) * mp.e ** (-(alpha + 2) * x**2), [0, 1, mp.inf])
    return float(kin - 2 * mu / (alpha + 2) * pot)
