"""Free Schroedinger flow, the singular weight |x|^-b and the INLS nonlinearity.

Time convention.  ``propagate(f, t)`` solves i u_t + Laplace u = 0, i.e. it
applies exp(-i t |xi|^2) on the angular-frequency lattice.  The modulation
estimates are usually quoted for the multiplier exp(i pi tau |nu|^2) with nu
in cycles; that is the same operator at t = -tau / (4 pi).  Pass
``convention="cycles"`` to give times in that normalization.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .grid import GridSpec, SpectralField
from .modspace import ModulationParams, WindowFamily, mod_norm

__all__ = [
    "SingularWeight",
    "pde_time",
    "propagate",
    "propagator_bound_probe",
    "nonlinearity",
    "g_difference",
    "energy_terms",
    "energy",
]

WEIGHT_MODES = ("average", "cap", "unit", "zero")


def _origin_cell_average(n: int, h: float, b: float) -> float:
    """Mean of |x|^-b over the cube [-h/2, h/2]^n."""
    half = h / 2
    if n == 1:
        return half ** -b / (1 - b)
    # polar form on the octant 0 <= theta <= pi/4
    val, _ = integrate.quad(lambda th: (half / math.cos(th)) ** (2 - b) / (2 - b),
                            0.0, math.pi / 4, epsabs=0, epsrel=1e-13)
    return 8 * val / h**2


def _cell_average(center, h: float, b: float) -> float:
    lo = [c - h / 2 for c in center]
    hi = [c + h / 2 for c in center]
    if len(center) == 1:
        val, _ = integrate.quad(lambda x: abs(x) ** -b, lo[0], hi[0], epsrel=1e-13)
        return val / h
    val, _ = integrate.dblquad(lambda y, x: math.hypot(x, y) ** -b, lo[0], hi[0], lo[1], hi[1],
                               epsrel=1e-12)
    return val / h**2


class SingularWeight:
    """Samples of |x|^-b with a regularized value on cells within h of the origin.

    Modes: ``average`` (cell mean by quadrature), ``cap`` (h^-b), ``unit``
    (weight 1, for b = 0 cross-checks) and ``zero`` (weight 0: linear flow).
    """

    def __init__(self, grid: GridSpec, b: float, mode: str = "average"):
        if mode not in WEIGHT_MODES:
            raise ValueError(f"unknown weight mode {mode!r}; pick one of {WEIGHT_MODES}")
        self.grid, self.b, self.mode = grid, float(b), mode
        r = grid.radius
        if mode == "unit":
            w = np.ones(grid.shape)
        elif mode == "zero":
            w = np.zeros(grid.shape)
        else:
            near = r < grid.h * (1 - 1e-12)
            w = np.empty(grid.shape)
            w[~near] = r[~near] ** -self.b
            if mode == "cap":
                w[near] = grid.h ** -self.b
            else:
                for idx in zip(*np.nonzero(near)):
                    center = [grid.x[i][idx] for i in range(grid.n)]
                    if all(abs(c) < grid.h / 2 for c in center):
                        w[idx] = _origin_cell_average(grid.n, grid.h, self.b)
                    else:
                        w[idx] = _cell_average(center, grid.h, self.b)
        w.flags.writeable = False
        self.values = w

    @property
    def is_zero(self) -> bool:
        return self.mode == "zero"

    def __repr__(self):
        return f"SingularWeight(b={self.b}, mode={self.mode!r}, grid={self.grid})"


def pde_time(t: float, convention: str = "pde") -> float:
    if convention == "pde":
        return t
    if convention == "cycles":
        return -t / (4 * math.pi)
    raise ValueError(f"unknown time convention {convention!r}")


def propagator_symbol(grid: GridSpec, t: float) -> np.ndarray:
    return np.exp(-1j * t * grid.xi2)


def propagate(f: SpectralField, t: float, convention: str = "pde") -> SpectralField:
    """Exact free flow on the lattice; unitary, a group, and a Fourier multiplier."""
    t = pde_time(t, convention)
    if t == 0:
        return f
    return f.with_hat(f.hat * propagator_symbol(f.grid, t))


def propagator_bound_probe(f: SpectralField, t: float, params: ModulationParams,
                           w: WindowFamily, form: str = "decay") -> float:
    """Ratio of ||e^{it Laplace} f||_{M^{p,q}_s} to its predicted bound (t in cycles time).

    decay:  bound (1+t^2)^{-(n/2)(1/2-1/p)} ||f||_{M^{p',q}_s}, needs p >= 2
    growth: bound (1+t^2)^{(n/2)|1/2-1/p|} ||f||_{M^{p,q}_s}
    """
    n, p = f.grid.n, params.p
    out = mod_norm(propagate(f, t, convention="cycles"), params, w)
    if form == "decay":
        if p < 2:
            raise ValueError("decay form needs p >= 2")
        pc = 1.0 if math.isinf(p) else p / (p - 1)
        inv_p = 0.0 if math.isinf(p) else 1 / p
        ref = mod_norm(f, ModulationParams(pc, params.q, params.s), w)
        bound = (1 + t * t) ** (-(n / 2) * (0.5 - inv_p)) * ref
    elif form == "growth":
        inv_p = 0.0 if math.isinf(p) else 1 / p
        bound = (1 + t * t) ** ((n / 2) * abs(0.5 - inv_p)) * mod_norm(f, params, w)
    else:
        raise ValueError(f"unknown form {form!r}")
    return out / bound if bound > 0 else 0.0


def _nl_values(u: np.ndarray, weight: np.ndarray, alpha: float, mu: float) -> np.ndarray:
    return mu * weight * np.abs(u) ** alpha * u


def nonlinearity(f: SpectralField, w: SingularWeight, alpha: float, mu: int) -> SpectralField:
    """Pointwise mu |x|^-b |f|^alpha f."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return f.with_values(_nl_values(f.values, w.values, alpha, mu))


def g_difference(u, v, w, alpha: float):
    """G(u, v, w) = |u+v|^a (u+v) - |u+w|^a (u+w), pointwise.

    Accepts SpectralFields (returns one) or complex arrays/scalars.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    field = next((z for z in (u, v, w) if isinstance(z, SpectralField)), None)
    uv = [z.values if isinstance(z, SpectralField) else z for z in (u, v, w)]
    a = uv[0] + uv[1]
    c = uv[0] + uv[2]
    out = np.abs(a) ** alpha * a - np.abs(c) ** alpha * c
    return field.with_values(out) if field is not None else out


def energy_terms(f: SpectralField, w: SingularWeight, alpha: float) -> tuple[float, float]:
    """(int |grad f|^2, int w |f|^(alpha+2)) on the grid."""
    g = f.grid
    kinetic = float((g.xi2 * np.abs(f.hat) ** 2).sum() / (2 * g.L) ** g.n)
    potential = float((w.values * np.abs(f.values) ** (alpha + 2)).sum() * g.cell)
    return kinetic, potential


def energy(f: SpectralField, w: SingularWeight, alpha: float, mu: int) -> float:
    """Conserved energy int |grad u|^2 - 2 mu/(alpha+2) int |x|^-b |u|^(alpha+2).

    The factor 2 is what makes this the Hamiltonian of
    i u_t + Laplace u + mu |x|^-b |u|^alpha u = 0.
    """
    kinetic, potential = energy_terms(f, w, alpha)
    return kinetic - 2 * mu / (alpha + 2) * potential
