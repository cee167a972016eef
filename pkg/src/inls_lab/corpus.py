"""Frozen test-function corpus.

Version "1" has 20 members in four families of five: Gaussians, chirped or
modulated Gaussians, sums of compactly supported bumps, and single Fourier
modes.  Parameters are chosen to be resolved on the default grids
(n=1: m=512, L=20; n=2: m=64, L=8).  Never edit a released version; add a new
one instead, since fitted test constants are pinned against it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, SpectralField, make_grid

__all__ = ["CorpusEntry", "CORPUS_VERSIONS", "corpus", "entries", "build", "default_grid",
           "random_corpus"]


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    kind: str
    params: tuple


_V1 = (
    [CorpusEntry(f"gauss{i}", "gauss", p) for i, p in enumerate([
        (1.0, 1.0, 0.0), (0.5, 2.0, 0.0), (2.0, 0.7, 1.0), (1.0, 1.5, -2.0), (0.8, 0.5, 0.5)])]
    + [CorpusEntry(f"chirp{i}", "chirp", p) for i, p in enumerate([
        (1.0, 3.0, 0.0), (1.5, 0.0, 0.5), (1.0, -3.0, 0.2), (2.0, 5.0, 0.0), (0.8, 2.0, -0.3)])]
    + [CorpusEntry(f"bumps{i}", "bumps", p) for i, p in enumerate([
        ((0.0, 2.0, 1.0),),
        ((-2.0, 1.5, 1.0), (2.0, 1.5, 0.5)),
        ((0.0, 3.0, 0.7), (1.0, 1.0, -0.5)),
        ((-3.0, 1.0, 1.0), (0.0, 1.0, 1.0), (3.0, 1.0, 1.0)),
        ((1.0, 4.0, 0.4),)])]
    + [CorpusEntry(f"mode{i}", "mode", p) for i, p in enumerate([
        (1.0, (0,)), (0.5, (1,)), (0.3, (-1,)), (0.2, (0, 1)), (0.4, (1, -1))])]
)

CORPUS_VERSIONS = {"1": tuple(_V1)}


def default_grid(n: int) -> GridSpec:
    return make_grid(1, 512, 20.0) if n == 1 else make_grid(2, 64, 8.0)


def _bump(r2: np.ndarray, R: float) -> np.ndarray:
    s = r2 / R**2
    out = np.zeros_like(s)
    inside = s < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside]))
    return out


def build(entry: CorpusEntry, grid: GridSpec) -> SpectralField:
    x = grid.x
    x1 = x[0]
    r2 = grid.radius**2
    kind, p = entry.kind, entry.params
    if kind == "gauss":
        A, s, c = p
        v = A * np.exp(-(r2 - 2 * c * x1 + c * c) / (2 * s * s))
    elif kind == "chirp":
        s, k, c = p
        v = np.exp(-r2 / (2 * s * s)) * np.exp(1j * (k * x1 + c * r2))
    elif kind == "bumps":
        v = np.zeros(grid.shape)
        for c, R, A in p:
            v = v + A * _bump(r2 - 2 * c * x1 + c * c, R)
    elif kind == "mode":
        A, js = p
        # integer cycles per unit length sit at block centers; periodic when 2L*j is an integer
        v = np.zeros(grid.shape, complex)
        for j in js:
            v = v + A * np.exp(2j * np.pi * j * x1)
    else:
        raise ValueError(f"unknown corpus kind {kind!r}")
    return SpectralField(grid, v)


def entries(version: str = "1") -> tuple:
    try:
        return CORPUS_VERSIONS[version]
    except KeyError:
        raise ValueError(f"unknown corpus version {version!r}") from None


def corpus(grid: GridSpec, version: str = "1") -> list[tuple[str, SpectralField]]:
    """[(id, field)] for every member of the versioned corpus."""
    return [(e.id, build(e, grid)) for e in entries(version)]


def random_corpus(grid: GridSpec, size: int, seed: int) -> list[tuple[str, SpectralField]]:
    """Seeded random Gaussian wave packets, for sweeps beyond the frozen set."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(size):
        A = rng.uniform(0.2, 2.0)
        s = rng.uniform(0.5, 2.0)
        c = rng.uniform(-2, 2)
        k = rng.uniform(-4, 4)
        x1 = grid.x[0]
        v = A * np.exp(-((grid.radius**2 - 2 * c * x1 + c * c) / (2 * s * s)) + 1j * k * x1)
        out.append((f"rand{seed}_{i}", SpectralField(grid, v)))
    return out
