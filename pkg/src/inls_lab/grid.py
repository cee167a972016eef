"""Periodic box discretization of R^n with a continuum-normalized FFT pair.

The box is [-L, L)^n with ``m`` points per axis.  Frequencies are angular
wavenumbers on the lattice (pi/L) * {-m/2, ..., m/2 - 1}, stored in FFT order.

The forward transform carries the cell volume h^n and the phase of the box
origin, so ``field.hat`` approximates the continuum integral
``int f(x) exp(-i xi.x) dx``.  With that normalization Parseval reads

    int |f|^2 dx  =  (2L)^(-n) * sum_j |hat f(xi_j)|^2 .
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

__all__ = [
    "GridSpec",
    "SpectralField",
    "make_grid",
    "lp_norm",
    "hs_norm",
    "dilate",
    "dump_field",
    "load_field",
    "fft_workers",
]


def fft_workers() -> int:
    """Thread cap for FFTs, read from ``INLS_LAB_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("INLS_LAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on [-L, L)^n."""

    n: int
    m: int
    L: float

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"unsupported dimension n={self.n}; only 1 and 2")
        if self.m < 16 or self.m & (self.m - 1):
            raise ValueError(f"m={self.m} must be a power of two >= 16")
        if not self.L > 0:
            raise ValueError(f"half-width L={self.L} must be positive")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.m

    @property
    def shape(self) -> tuple:
        return (self.m,) * self.n

    @property
    def size(self) -> int:
        return self.m**self.n

    @property
    def cell(self) -> float:
        """Cell volume h^n (rectangle-rule weight)."""
        return self.h**self.n

    @property
    def dxi(self) -> float:
        return np.pi / self.L

    @cached_property
    def x1d(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.m)

    @cached_property
    def xi1d(self) -> np.ndarray:
        """Angular frequencies along one axis, FFT order."""
        return self.dxi * np.fft.fftfreq(self.m, d=1.0 / self.m)

    @cached_property
    def x(self) -> tuple:
        return tuple(np.meshgrid(*([self.x1d] * self.n), indexing="ij"))

    @cached_property
    def xi(self) -> tuple:
        return tuple(np.meshgrid(*([self.xi1d] * self.n), indexing="ij"))

    @cached_property
    def radius(self) -> np.ndarray:
        return np.sqrt(sum(c**2 for c in self.x))

    @cached_property
    def xi2(self) -> np.ndarray:
        """|xi|^2 on the frequency lattice."""
        return sum(k**2 for k in self.xi)

    @cached_property
    def _origin_phase(self) -> np.ndarray:
        # exp(i xi L) = (-1)^j for xi = j pi / L
        j = np.rint(self.xi1d / self.dxi).astype(np.int64)
        s1 = np.where(j % 2 == 0, 1.0, -1.0)
        out = s1
        for _ in range(self.n - 1):
            out = np.multiply.outer(out, s1)
        return out

    def forward(self, values: np.ndarray) -> np.ndarray:
        return self.cell * self._origin_phase * sfft.fftn(values, workers=fft_workers())

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        return sfft.ifftn(coeffs * self._origin_phase, workers=fft_workers()) / self.cell

    def to_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "L": self.L}


def make_grid(n: int, m: int, L: float) -> GridSpec:
    return GridSpec(int(n), int(m), float(L))


class SpectralField:
    """Complex field on a grid, with lazily computed frequency coefficients.

    Instances are treated as immutable; the stored arrays are read-only.
    """

    __slots__ = ("grid", "_values", "_hat")

    def __init__(self, grid: GridSpec, values=None, *, hat=None):
        if (values is None) == (hat is None):
            raise TypeError("give exactly one of values / hat")
        self.grid = grid
        self._values = None
        self._hat = None
        if values is not None:
            self._values = _frozen(values, grid)
        else:
            self._hat = _frozen(hat, grid)

    @classmethod
    def from_hat(cls, grid: GridSpec, hat) -> "SpectralField":
        return cls(grid, hat=hat)

    @classmethod
    def from_function(cls, grid: GridSpec, func) -> "SpectralField":
        return cls(grid, func(*grid.x))

    @classmethod
    def zeros(cls, grid: GridSpec) -> "SpectralField":
        return cls(grid, np.zeros(grid.shape, complex))

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            self._values = _frozen(self.grid.inverse(self._hat), self.grid)
        return self._values

    @property
    def hat(self) -> np.ndarray:
        if self._hat is None:
            self._hat = _frozen(self.grid.forward(self._values), self.grid)
        return self._hat

    def with_values(self, values) -> "SpectralField":
        return SpectralField(self.grid, values)

    def with_hat(self, hat) -> "SpectralField":
        return SpectralField(self.grid, hat=hat)

    def _coerce(self, other):
        if isinstance(other, SpectralField):
            if other.grid != self.grid:
                raise ValueError("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return self.with_values(self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.with_values(self.values - self._coerce(other))

    def __rsub__(self, other):
        return self.with_values(self._coerce(other) - self.values)

    def __mul__(self, other):
        return self.with_values(self.values * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)

    def __repr__(self):
        return f"SpectralField(grid={self.grid}, l2={lp_norm(self, 2):.6g})"


def _frozen(arr, grid: GridSpec) -> np.ndarray:
    out = np.array(arr, dtype=complex).reshape(grid.shape)
    out.flags.writeable = False
    return out


def _lp_values(values: np.ndarray, p: float, cell: float, axis=None) -> np.ndarray:
    """Rectangle-rule L^p norm of sampled values (reduces over ``axis``)."""
    if p < 1:
        raise ValueError(f"exponent p={p} must be >= 1")
    a = np.abs(values)
    if np.isinf(p):
        return a.max(axis=axis)
    if p == 2:
        return np.sqrt((a * a).sum(axis=axis) * cell)
    return ((a**p).sum(axis=axis) * cell) ** (1.0 / p)


def lp_norm(f: SpectralField, p: float) -> float:
    """(sum |f(x_j)|^p h^n)^(1/p); the max of |f| when p is infinite."""
    return float(_lp_values(f.values, p, f.grid.cell))


def l2_freq(f: SpectralField) -> float:
    """Frequency-side L^2 norm (Parseval partner of ``lp_norm(f, 2)``)."""
    g = f.grid
    return float(np.sqrt((np.abs(f.hat) ** 2).sum() / (2 * g.L) ** g.n))


def hs_norm(f: SpectralField, s: float, homogeneous: bool = False) -> float:
    """Sobolev norm with weight |xi|^s (homogeneous) or (1 + |xi|^2)^(s/2)."""
    g = f.grid
    c2 = np.abs(f.hat) ** 2
    if homogeneous:
        zero = g.xi2 == 0
        if s < 0:
            # |hat f(0)| is h^n-weighted; compare against ||f||_2 in the same units
            if np.sqrt(c2[zero].sum()) > 1e-12 * np.sqrt(c2.sum()):
                raise ValueError("negative homogeneous norm needs a mean-zero field")
            weight = np.zeros_like(g.xi2)
            weight[~zero] = g.xi2[~zero] ** s
        else:
            weight = g.xi2**s if s != 0 else np.ones_like(g.xi2)
    else:
        weight = (1.0 + g.xi2) ** s
    return float(np.sqrt((weight * c2).sum() / (2 * g.L) ** g.n))


def dilate(f: SpectralField, lam: int, amplitude_power: float = 0.0) -> SpectralField:
    """Return lam^amplitude_power * f(lam x) for dyadic integer ``lam``.

    Built on the frequency side: ``f`` is zero-padded to the box of half-width
    lam*L, whose lattice is lam times finer, and the central m coefficients
    are kept.  Exact when f is localized in |x| < L/lam and band-limited to
    1/lam of the resolved band.
    """
    lam = int(lam)
    if lam < 1 or lam & (lam - 1):
        raise ValueError(f"dilation factor {lam} must be a power of two")
    g = f.grid
    if lam == 1:
        return f.with_values(f.values * 1.0)
    big = GridSpec(g.n, g.m * lam, g.L * lam)
    pad = np.zeros(big.shape, complex)
    lo = (g.m * lam - g.m) // 2
    sl = tuple(slice(lo, lo + g.m) for _ in range(g.n))
    pad[sl] = f.values
    coarse_hat = big.forward(pad)
    # coarse_hat[j] = hat f(j*pi/(lam L)); we need hat f(xi/lam) at xi = j*pi/L -> same j
    idx = np.fft.fftfreq(g.m, d=1.0 / g.m).astype(np.int64)
    take = np.ix_(*([idx % big.m] * g.n))
    hat = coarse_hat[take] * float(lam) ** (amplitude_power - g.n)
    return SpectralField.from_hat(g, hat)


def dump_field(f: SpectralField, path, representation: str = "physical") -> None:
    """Write a JSON header line then little-endian float64 (re, im) pairs, row-major."""
    if representation not in ("physical", "frequency"):
        raise ValueError(f"unknown representation {representation!r}")
    data = f.values if representation == "physical" else f.hat
    header = dict(f.grid.to_dict(), representation=representation)
    inter = np.empty(data.size * 2, dtype="<f8")
    flat = np.ascontiguousarray(data).ravel(order="C")
    inter[0::2] = flat.real
    inter[1::2] = flat.imag
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        fh.write(inter.tobytes())


def load_field(path) -> SpectralField:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode())
        raw = fh.read()
    grid = make_grid(header["n"], header["m"], header["L"])
    if len(raw) != grid.size * 16:
        raise ValueError(f"payload has {len(raw)} bytes, expected {grid.size * 16}")
    inter = np.frombuffer(raw, dtype="<f8")
    data = (inter[0::2] + 1j * inter[1::2]).reshape(grid.shape)
    if header["representation"] == "physical":
        return SpectralField(grid, data)
    return SpectralField.from_hat(grid, data)

