"""Local-in-time INLS solvers and space-time diagnostics.

Two independent integrators share the same flows:

* :func:`splitstep_solve` -- Strang splitting of the exact pointwise phase
  flow of the potential term and the exact free propagator.
* :func:`picard_solve` -- fixed-point iteration of the Duhamel map
  u = e^{it Laplace} u0 + i int_0^t e^{i(t-s) Laplace} N(u(s)) ds.

The Duhamel integral is discretized with F = N(u) linear in s on each
substep and the propagator phase integrated exactly (exponential trapezoid),
so the free part is reproduced exactly and smooth data converge at second
order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exponents import Constants, ProblemParams, derive_all, local_time_exponent
from .grid import GridSpec, SpectralField, _lp_values
from .evolution import SingularWeight, _nl_values, energy, propagator_symbol

__all__ = [
    "PicardOptions",
    "SolverConfig",
    "Trajectory",
    "NonContractionError",
    "splitstep_solve",
    "picard_solve",
    "ytnorm",
    "lipschitz_probe",
    "calibrate_local_constant",
    "local_time",
    "duhamel_source_ratio",
    "random_perturbation",
]


class NonContractionError(RuntimeError):
    """Picard differences grew twice in a row: T too large or C miscalibrated."""

    def __init__(self, ratio: float, history: list):
        self.ratio = ratio
        self.history = history
        super().__init__(f"Picard iteration is not contracting (difference ratio {ratio:.4g})")


@dataclass(frozen=True)
class PicardOptions:
    max_iters: int = 60
    contraction_tol: float = 1e-12
    substeps: int = 64

    def __post_init__(self):
        if self.max_iters < 2:
            raise ValueError("max_iters must be >= 2")
        if self.substeps < 1:
            raise ValueError("substeps must be >= 1")


@dataclass(frozen=True)
class SolverConfig:
    params: ProblemParams
    grid: GridSpec
    dt: float
    T: float
    picard: PicardOptions = PicardOptions()
    monitors: tuple = ("mass", "energy", "y_norm")
    blowup_threshold: float = 1e3
    weight_mode: str = "average"
    save_every: int = 1
    constants: Constants = Constants()

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.T > 0:
            raise ValueError("T must be positive")
        if self.save_every < 1:
            raise ValueError("save_every must be >= 1")

    @property
    def linear(self) -> bool:
        return self.weight_mode == "zero"

    def weight(self) -> SingularWeight:
        return _weight_cache(self.grid, self.params.b, self.weight_mode)

    def replace(self, **kw) -> "SolverConfig":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(kw)
        return SolverConfig(**d)


_WEIGHTS: dict = {}


def _weight_cache(grid, b, mode) -> SingularWeight:
    key = (grid, b, mode)
    if key not in _WEIGHTS:
        _WEIGHTS[key] = SingularWeight(grid, b, mode)
    return _WEIGHTS[key]


@dataclass
class Trajectory:
    """Time samples of a solution with its conserved-quantity ledger."""

    grid: GridSpec
    times: np.ndarray
    fields: np.ndarray
    ledger: dict = field(default_factory=dict)
    blowup: bool = False
    blowup_time: float | None = None

    def __len__(self):
        return len(self.times)

    def field(self, i: int) -> SpectralField:
        return SpectralField(self.grid, self.fields[i])

    @property
    def final(self) -> SpectralField:
        return self.field(-1)

    def norms(self, r: float) -> np.ndarray:
        axes = tuple(range(1, self.grid.n + 1))
        return _lp_values(self.fields, r, self.grid.cell, axis=axes)


def _ledger(traj: Trajectory, params: ProblemParams, weight: SingularWeight, monitors) -> None:
    r = params.alpha + 2
    led = traj.ledger
    led["t"] = traj.times
    if "mass" in monitors:
        led["mass"] = traj.norms(2) ** 2
    if "energy" in monitors:
        led["energy"] = np.array([energy(traj.field(i), weight, params.alpha, params.mu)
                                  for i in range(len(traj))])
    led[f"l{r:g}"] = traj.norms(r)
    if "y_norm" in monitors and len(traj) > 1:
        q = 4 * r / (params.n * params.alpha)
        led["y_norm"] = ytnorm(traj, q, r)


def _monitor(values: np.ndarray, grid: GridSpec) -> float:
    # combined size: sup norm plus H^1-seminorm proxy, both blow up together
    return float(np.abs(values).max())


def splitstep_solve(u0: SpectralField, cfg: SolverConfig) -> Trajectory:
    """Strang splitting: half potential phase, full free flow, half phase."""
    grid, params = cfg.grid, cfg.params
    steps = max(1, int(round(cfg.T / cfg.dt)))
    dt = cfg.T / steps
    weight = cfg.weight()
    wv = weight.values
    a, mu = params.alpha, params.mu
    lin = propagator_symbol(grid, dt)
    u = np.array(u0.values)
    times, frames = [0.0], [u.copy()]
    ref = _monitor(u, grid)
    ref_grad = _grad_norm(u0)
    blow, blow_t = False, None

    def phase(v, tau):
        if weight.is_zero:
            return v
        return v * np.exp(1j * mu * wv * np.abs(v) ** a * tau)

    for j in range(1, steps + 1):
        u = phase(u, dt / 2)
        u = grid.inverse(grid.forward(u) * lin)
        u = phase(u, dt / 2)
        if j % cfg.save_every == 0 or j == steps:
            times.append(j * dt)
            frames.append(u.copy())
            big = _monitor(u, grid) > cfg.blowup_threshold * ref
            g = _grad_norm(SpectralField(grid, u))
            big = big or g > cfg.blowup_threshold * max(ref_grad, 1e-300)
            if big or not np.all(np.isfinite(u)):
                blow, blow_t = True, j * dt
                break
    traj = Trajectory(grid, np.array(times), np.array(frames), blowup=blow, blowup_time=blow_t)
    _ledger(traj, params, weight, cfg.monitors)
    return traj


def _grad_norm(f: SpectralField) -> float:
    g = f.grid
    return float(np.sqrt((g.xi2 * np.abs(f.hat) ** 2).sum() / (2 * g.L) ** g.n))


def _phi_weights(grid: GridSpec, h: float) -> tuple[np.ndarray, np.ndarray]:
    """phi0 = int_0^h e^{-i s k^2} ds and phi1 = (1/h) int_0^h s e^{-i s k^2} ds."""
    z = h * grid.xi2
    iz = 1j * z
    small = np.abs(z) < 1e-2
    zs = np.where(small, 1.0, z)
    izs = 1j * zs
    e = np.exp(-izs)
    phi0 = (1 - e) / izs
    phi1 = -e / izs + (1 - e) / izs**2
    # Taylor series near k = 0 (relative error far below 1e-16 for |z| < 1e-2)
    s0 = 1 - iz / 2 + iz**2 / 6 - iz**3 / 24 + iz**4 / 120 - iz**5 / 720
    s1 = 0.5 - iz / 3 + iz**2 / 8 - iz**3 / 30 + iz**4 / 144 - iz**5 / 840
    phi0 = np.where(small, s0, phi0) * h
    phi1 = np.where(small, s1, phi1) * h
    return phi0, phi1


def duhamel(free_hat: np.ndarray, source_hat: np.ndarray, grid: GridSpec, h: float) -> np.ndarray:
    """Nodes of free + i int_0^t e^{i(t-s)Laplace} F(s) ds for F linear per substep.

    ``free_hat`` and ``source_hat`` have shape (S+1,) + grid.shape in the
    frequency representation; returns the same shape.
    """
    E = propagator_symbol(grid, h)
    phi0, phi1 = _phi_weights(grid, h)
    out = np.empty_like(free_hat)
    acc = np.zeros(grid.shape, complex)
    out[0] = free_hat[0]
    for i in range(len(free_hat) - 1):
        acc = E * acc + (phi0 - phi1) * source_hat[i + 1] + phi1 * source_hat[i]
        out[i + 1] = free_hat[i + 1] + 1j * acc
    return out


def _x1_norm(frames: np.ndarray, times: np.ndarray, grid: GridSpec, params: ProblemParams) -> float:
    axes = tuple(range(1, grid.n + 1))
    r = params.alpha + 2
    q = 4 * r / (params.n * params.alpha)
    l2 = _lp_values(frames, 2, grid.cell, axis=axes).max()
    lr = _lp_values(frames, r, grid.cell, axis=axes)
    y = _time_norm(lr, times, q)
    return float(max(l2, y))


def _time_norm(vals: np.ndarray, times: np.ndarray, q: float) -> float:
    if len(times) < 2:
        raise ValueError("need at least two time samples")
    if math.isinf(q):
        return float(np.max(vals))
    return float(np.trapezoid(vals**q, times) ** (1 / q))


def _to_hat(grid: GridSpec, frames: np.ndarray) -> np.ndarray:
    return np.array([grid.forward(f) for f in frames])


def _to_values(grid: GridSpec, hats: np.ndarray) -> np.ndarray:
    return np.array([grid.inverse(h) for h in hats])


def picard_solve(u0: SpectralField, cfg: SolverConfig, T: float | None = None):
    """Iterate the Duhamel map from the free evolution until it contracts.

    Returns ``(trajectory, history)``; history holds one dict per iterate with
    the X1-proxy difference max(L^inf_T L^2, Y(T)) and its ratio to the
    previous difference.  ``contraction_tol`` is relative to the iterate's
    X1-proxy size.
    """
    grid, params = cfg.grid, cfg.params
    T = cfg.T if T is None else T
    S = cfg.picard.substeps
    h = T / S
    times = h * np.arange(S + 1)
    weight = cfg.weight()
    free_hat = np.array([u0.hat * propagator_symbol(grid, t) for t in times])
    u = _to_values(grid, free_hat)
    history = []
    prev, bad = None, 0
    for it in range(1, cfg.picard.max_iters + 1):
        if weight.is_zero:
            new = u
        else:
            src = _to_hat(grid, _nl_values(u, weight.values, params.alpha, params.mu))
            new = _to_values(grid, duhamel(free_hat, src, grid, h))
        diff = _x1_norm(new - u, times, grid, params)
        scale = _x1_norm(new, times, grid, params)
        ratio = diff / prev if prev else None
        history.append({"iter": it, "diff": diff, "ratio": ratio})
        u = new
        if diff <= cfg.picard.contraction_tol * max(scale, 1e-300):
            break
        if ratio is not None and ratio > 1:
            bad += 1
            if bad >= 2:
                raise NonContractionError(ratio, history)
        else:
            bad = 0
        prev = diff
    traj = Trajectory(grid, times, u)
    _ledger(traj, params, weight, cfg.monitors)
    return traj, history


def ytnorm(traj: Trajectory, q_t: float, r_x: float) -> float:
    """(int_0^T ||u(t)||_{L^r}^q dt)^{1/q} by the trapezoid rule; max when q = inf."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    vals = traj.norms(r_x)
    if math.isinf(q_t):
        return float(vals.max())
    if len(traj) == 1:
        raise ValueError("need at least two time samples")
    return _time_norm(vals, traj.times, q_t)


def local_time(u0_norm: float, params: ProblemParams, C: float = 1.0) -> float:
    """T = min{1, C ||u0||^(-alpha/zeta)}."""
    if u0_norm <= 0:
        return 1.0
    return min(1.0, C * u0_norm ** (-params.alpha / local_time_exponent(params)))


def calibrate_local_constant(u0: SpectralField, cfg: SolverConfig, u0_norm: float,
                             target: float = 0.5, start: float = 1.0, fraction: float = 0.25,
                             max_halvings: int = 30):
    """Largest C = start / 2^j for which Picard on [0, fraction*T_local] has
    every difference ratio from the second iterate on at most ``target``.

    Returns ``(C, T, history)``.
    """
    C = start
    for _ in range(max_halvings):
        T = fraction * local_time(u0_norm, cfg.params, C)
        try:
            _, hist = picard_solve(u0, cfg.replace(T=T))
        except NonContractionError:
            C /= 2
            continue
        ratios = [h["ratio"] for h in hist[1:] if h["ratio"] is not None]
        if all(r <= target for r in ratios):
            return C, T, hist
        C /= 2
    raise RuntimeError("no contraction constant found")


def random_perturbation(grid: GridSpec, seed: int = 0, modes: int = 6) -> SpectralField:
    """Smooth unit-L^2 perturbation: Gaussian envelope times random low modes."""
    rng = np.random.default_rng(seed)
    vals = np.zeros(grid.shape, complex)
    for _ in range(modes):
        k = rng.normal(size=grid.n) * 1.5
        c = rng.normal() + 1j * rng.normal()
        vals += c * np.exp(1j * sum(ki * xi for ki, xi in zip(k, grid.x)))
    vals *= np.exp(-grid.radius**2 / 4)
    f = SpectralField(grid, vals)
    return SpectralField(grid, vals / _lp_values(f.values, 2, grid.cell))


def lipschitz_probe(u0: SpectralField, delta: float, cfg: SolverConfig, seed: int = 0,
                    solver: str = "splitstep") -> float:
    """sup_t ||u(t; u0 + delta g) - u(t; u0)||_2 / delta for a unit perturbation g."""
    if delta == 0:
        return 0.0
    g = random_perturbation(cfg.grid, seed)
    run = splitstep_solve if solver == "splitstep" else (lambda f, c: picard_solve(f, c)[0])
    a = run(u0, cfg)
    b = run(u0 + delta * g, cfg)
    n = min(len(a), len(b))
    d = Trajectory(cfg.grid, a.times[:n], b.fields[:n] - a.fields[:n]).norms(2)
    return float(d.max() / delta)


def _conj(p: float) -> float:
    if math.isinf(p):
        return 1.0
    if p == 1:
        return math.inf
    return p / (p - 1)


def duhamel_source_ratio(traj: Trajectory, params: ProblemParams, weight: SingularWeight) -> dict:
    """Measured dual Strichartz norms of |x|^-b |u|^a u against the Y(T) bound.

    A1 uses the pair (gamma1, rho1) outside the unit ball, A2 the pair
    (gamma2, rho2) inside it.  The bound is
    (T^{1-n a/4} + T^{zeta}) ||u||_Y^{a+1}.
    """
    rep = derive_all(params)
    g = traj.grid
    a = params.alpha
    inside = g.radius < 1.0
    src = np.abs(traj.fields) ** a * np.abs(traj.fields)
    axes = tuple(range(1, g.n + 1))
    out_x = _lp_values(np.where(inside, 0.0, src), _conj(rep.rho1), g.cell, axis=axes)
    in_x = _lp_values(np.where(inside, weight.values * src, 0.0), _conj(rep.rho2), g.cell, axis=axes)
    A1 = _time_norm(out_x, traj.times, rep.gamma1_conj)
    A2 = _time_norm(in_x, traj.times, _conj(rep.gamma2))
    T = traj.times[-1] - traj.times[0]
    y = ytnorm(traj, rep.gamma1, rep.rho1)
    e1, e2 = rep.source_exponents
    bound = (T**e1 + T**e2) * y ** (a + 1)
    return {"A1": A1, "A2": A2, "bound": bound, "ratio": (A1 + A2) / bound if bound else 0.0}
