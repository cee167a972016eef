"""Frequency-uniform decomposition and modulation-space norms on a grid.

Block k in Z^n lives at angular frequency ``block_width * k``; the default
``block_width = 2*pi`` puts block centers on the integer lattice in cycles
(xi / 2pi), which is the Fourier convention of the modulation-space theory.

The bump rho is tensorized, so the normalized windows factor as
sigma_k(xi) = prod_i sigma1_{k_i}(xi_i) and only 1-D window tables are stored.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from .grid import GridSpec, SpectralField, _lp_values, fft_workers, lp_norm

__all__ = [
    "bump",
    "WindowFamily",
    "ModulationParams",
    "block",
    "block_norms",
    "mod_norm",
    "gaussian_window",
    "stft_norm",
]


def _smooth_step(s):
    # 0 for s <= 0, 1 for s >= 1, C^infinity in between
    s = np.asarray(s, dtype=float)
    a = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
    t = 1.0 - s
    c = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
    return a / (a + c)


def bump(t):
    """1-D plateau bump: 1 on |t| <= 1/2, 0 on |t| >= 1."""
    return _smooth_step(2.0 * (1.0 - np.abs(t)))


@dataclass(frozen=True)
class ModulationParams:
    p: float
    q: float
    s: float = 0.0

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise ValueError(f"modulation exponents must be >= 1, got p={self.p}, q={self.q}")


class WindowFamily:
    """Normalized windows sigma_k on a grid's frequency lattice."""

    def __init__(self, grid: GridSpec, block_width: float = 2 * np.pi):
        if block_width <= 0:
            raise ValueError("block_width must be positive")
        self.grid = grid
        self.block_width = float(block_width)
        nu = grid.xi1d / self.block_width
        lo = math.floor(nu.min()) - 1
        hi = math.ceil(nu.max()) + 1
        cand = np.arange(lo, hi + 1)
        rho = bump(nu[None, :] - cand[:, None])
        keep = rho.max(axis=1) > 0
        self.axis_indices = cand[keep]
        rho = rho[keep]
        self.sigma1 = rho / rho.sum(axis=0, keepdims=True)
        self._pos = {int(k): i for i, k in enumerate(self.axis_indices)}

    @cached_property
    def indices(self) -> np.ndarray:
        """Active set K as an (|K|, n) integer array, lexicographic order."""
        return np.array(list(itertools.product(self.axis_indices, repeat=self.grid.n)), dtype=int)

    def __len__(self):
        return len(self.axis_indices) ** self.grid.n

    def __contains__(self, k) -> bool:
        k = np.atleast_1d(k)
        return len(k) == self.grid.n and all(int(c) in self._pos for c in k)

    def window(self, k) -> np.ndarray:
        """sigma_k sampled on the lattice (FFT order)."""
        k = np.atleast_1d(k)
        if k not in self:
            raise ValueError(f"block index {tuple(k)} is outside the active set")
        out = self.sigma1[self._pos[int(k[0])]]
        for c in k[1:]:
            out = np.multiply.outer(out, self.sigma1[self._pos[int(c)]])
        return out

    def partition_error(self) -> float:
        total = self.sigma1.sum(axis=0)
        # tensor product of per-axis sums; the 1-D sum bounds the n-D one
        err1 = np.abs(total - 1).max()
        return float((1 + err1) ** self.grid.n - 1)

    def support_radius(self, k) -> float:
        """max |nu - k|_inf over lattice points where sigma_k > 0 (in block units)."""
        k = np.atleast_1d(k)
        w = self.window(k)
        nu = [c / self.block_width for c in self.grid.xi]
        d = np.max([np.abs(nu[i] - k[i]) for i in range(self.grid.n)], axis=0)
        return float(d[w > 0].max())


def block(f: SpectralField, k, w: WindowFamily) -> SpectralField:
    """Box_k f: the field with frequency content hat f * sigma_k."""
    return f.with_hat(f.hat * w.window(k))


def _block_values_iter(f: SpectralField, w: WindowFamily, chunk: int = 64):
    """Yield (indices, values) for the blocks in deterministic chunks."""
    g = f.grid
    ks = w.indices
    for start in range(0, len(ks), chunk):
        sub = ks[start:start + chunk]
        hats = np.empty((len(sub),) + g.shape, complex)
        for i, k in enumerate(sub):
            hats[i] = f.hat * w.window(k)
        axes = tuple(range(1, g.n + 1))
        vals = sfft.ifftn(hats * g._origin_phase, axes=axes, workers=fft_workers()) / g.cell
        yield sub, vals


def block_norms(f: SpectralField, p: float, w: WindowFamily) -> tuple[np.ndarray, np.ndarray]:
    """(K, ||Box_k f||_{L^p}) over the active set."""
    g = f.grid
    out = []
    axes = tuple(range(1, g.n + 1))
    for _, vals in _block_values_iter(f, w):
        out.append(_lp_values(vals, p, g.cell, axis=axes))
    return w.indices, np.concatenate(out)


def _weighted_lq(norms: np.ndarray, ks: np.ndarray, q: float, s: float) -> float:
    if s != 0:
        norms = norms * (1.0 + np.linalg.norm(ks, axis=1)) ** s
    if np.isinf(q):
        return float(norms.max(initial=0.0))
    return float((norms**q).sum() ** (1.0 / q))


def mod_norm(f: SpectralField, params: ModulationParams, w: WindowFamily) -> float:
    """|| ||Box_k f||_{L^p} (1+|k|)^s ||_{l^q_k}."""
    ks, norms = block_norms(f, params.p, w)
    return _weighted_lq(norms, ks, params.q, params.s)


def gaussian_window(grid: GridSpec) -> SpectralField:
    """L^2-normalized Gaussian exp(-pi |x|^2) centered at the origin."""
    g = np.exp(-np.pi * grid.radius**2)
    win = SpectralField(grid, g)
    return SpectralField(grid, g / lp_norm(win, 2))


def stft_norm(f: SpectralField, params: ModulationParams, g: SpectralField | None = None,
              stride: int = 1) -> float:
    """Mixed norm || ||V_g f(x, w)||_{L^p_x} (1+|w|^2)^(s/2) ||_{L^q_w}.

    V_g f(x_j, w) = int f(t) conj(g(t - x_j)) exp(-2 pi i w.t) dt with x_j
    running over every ``stride``-th grid point (periodic shifts) and w in
    cycles on the grid's frequency lattice.
    """
    grid = f.grid
    if g is None:
        g = gaussian_window(grid)
    gn = lp_norm(g, 2)
    if gn == 0:
        raise ValueError("STFT window must be nonzero")
    gv = np.conj(g.values) / gn
    # origin sits at index m/2 on each axis
    c = grid.m // 2
    shifts = range(0, grid.m, stride)
    cell_x = grid.cell * stride**grid.n
    omega2 = grid.xi2 / (2 * np.pi) ** 2
    wgt = (1.0 + omega2) ** (params.s / 2)
    acc = None
    for combo in itertools.product(shifts, repeat=grid.n):
        roll = tuple(j - c for j in combo)
        win = np.roll(gv, roll, axis=tuple(range(grid.n)))
        V = np.abs(grid.forward(f.values * win))
        if np.isinf(params.p):
            acc = V if acc is None else np.maximum(acc, V)
        else:
            term = V**params.p
            acc = term if acc is None else acc + term
    if np.isinf(params.p):
        lpx = acc
    else:
        lpx = (acc * cell_x) ** (1.0 / params.p)
    vals = lpx * wgt
    dw = (1.0 / (2 * grid.L)) ** grid.n
    if np.isinf(params.q):
        return float(vals.max())
    return float(((vals**params.q).sum() * dw) ** (1.0 / params.q))
