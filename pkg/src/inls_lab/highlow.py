"""High-low splitting of data and the windowed global iteration.

Data u0 is split as phi0 + psi0 with phi0 in L^2 (size ~ N^beta) and psi0
small in M^{a+2,(a+2)'} (size ~ 1/N).  On each window of length T(N) the
rough part evolves by the full equation (v), the smooth part by the free
flow, and w absorbs their interaction:

    u(t) = v_k(t - kT) + w_k(t - kT) + e^{it Laplace} psi0,  t in [kT, (k+1)T].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .evolution import g_difference, propagate, propagator_symbol
from .exponents import Constants, HypothesisError, ProblemParams, beta_for, derive_all
from .grid import SpectralField, lp_norm
from .modspace import ModulationParams, WindowFamily, block_norms, mod_norm
from .solver import (NonContractionError, SolverConfig, Trajectory, _ledger, _time_norm,
                     _to_hat, _to_values, _x1_norm, duhamel, splitstep_solve)

__all__ = [
    "SplitResult",
    "WindowConditionError",
    "RunLedger",
    "split",
    "smooth_norm",
    "sum_space_norm",
    "perturbed_solve",
    "global_run",
]


class WindowConditionError(ValueError):
    """A window violates (c1)-(c3); ``conditions`` maps name -> (lhs, rhs)."""

    def __init__(self, conditions: dict, step: int | None = None):
        self.conditions = conditions
        self.step = step
        where = f" at step {step}" if step is not None else ""
        parts = [f"{k}: {lhs:.6g} > {rhs:.6g}" for k, (lhs, rhs) in conditions.items()]
        super().__init__(f"window conditions fail{where}: " + "; ".join(parts))


def smooth_norm(f: SpectralField, params: ProblemParams, w: WindowFamily) -> float:
    """||f||_{M^{a+2,(a+2)'}}."""
    return mod_norm(f, ModulationParams(params.r, params.r_conj), w)


@dataclass
class SplitResult:
    phi: SpectralField
    psi: SpectralField
    N: float
    tau: float
    phi_l2: float
    psi_mod: float
    u_mod: float
    target_phi: float
    target_psi: float
    beta: float
    flag: str = ""
    psi_blocks: int = 0

    def summary(self) -> dict:
        return {k: getattr(self, k) for k in ("N", "tau", "phi_l2", "psi_mod", "u_mod",
                                              "target_phi", "target_psi", "beta", "flag",
                                              "psi_blocks")}


def _prefix_fields(u: SpectralField, w: WindowFamily, order: np.ndarray):
    """Return a function j -> psi made of the first j blocks in ``order``."""
    ks = w.indices

    def psi(j: int) -> SpectralField:
        if j == 0:
            return SpectralField.zeros(u.grid)
        mask = np.zeros(u.grid.shape)
        for i in order[:j]:
            mask = mask + w.window(ks[i])
        return u.with_hat(u.hat * mask)

    return psi


def split(u: SpectralField, N: float, params: ProblemParams, w: WindowFamily,
          C: float = 1.0) -> SplitResult:
    """Block-threshold split meeting ||psi||_{M^{r,r'}} <= C ||u||_{M^{p,p'}} / N.

    Blocks are ordered by a_k = ||Box_k u||_{L^r}; psi collects the blocks with
    a_k <= tau and tau is the largest threshold (found by bisection over the
    sorted a_k) whose psi still meets the target.
    """
    if not N > 1:
        raise HypothesisError([f"N > 1 fails (N={N})"])
    if params.p is None:
        raise HypothesisError(["modulation exponent p is required"])
    derive_all(params.replace(N=None))  # raises on p outside (2, p_max)
    p, r = params.p, params.r
    beta = beta_for(params)
    u_mod = mod_norm(u, ModulationParams(p, p / (p - 1)), w)
    t_phi, t_psi = C * u_mod * N**beta, C * u_mod / N
    ks, a = block_norms(u, r, w)
    order = np.argsort(a, kind="stable")
    psi_of = _prefix_fields(u, w, order)

    def ok(j: int) -> bool:
        return smooth_norm(psi_of(j), params, w) <= t_psi

    if u_mod == 0:
        zero = SpectralField.zeros(u.grid)
        return SplitResult(zero, zero, N, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, beta, "zero", 0)
    K = len(order)
    if ok(K):
        j, flag = K, "psi_only"
    else:
        lo, hi = 0, K  # ok(lo) holds, ok(hi) fails
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ok(mid):
                lo = mid
            else:
                hi = mid
        j = lo
        # blocks with negligible a_k carry no data; only the rest decide the flag
        live = a[order[:j]] > 1e-12 * a.max()
        flag = "phi_only" if not live.any() else ""
    psi = psi_of(j)
    phi = u - psi
    tau = float(a[order[j - 1]]) if j else 0.0
    return SplitResult(phi, psi, N, tau, lp_norm(phi, 2), smooth_norm(psi, params, w), u_mod,
                       t_phi, t_psi, beta, flag, j)


def sum_space_norm(u: SpectralField, params: ProblemParams, w: WindowFamily,
                   max_candidates: int = 64) -> float:
    """Upper proxy for ||u||_{L^2 + M^{r,r'}}: min over block-threshold splits.

    Candidates are psi = first j blocks by increasing a_k (j = 0 is u in L^2,
    j = |K| is u in M); at most ``max_candidates`` values of j are tried.
    """
    ks, a = block_norms(u, params.r, w)
    order = np.argsort(a, kind="stable")
    psi_of = _prefix_fields(u, w, order)
    K = len(order)
    js = np.unique(np.linspace(0, K, min(K + 1, max_candidates)).round().astype(int))
    best = math.inf
    for j in js:
        psi = psi_of(int(j))
        best = min(best, lp_norm(u - psi, 2) + smooth_norm(psi, params, w))
    return float(best)


def _check_window(params: ProblemParams, T: float, phi_l2: float, psi_mod: float,
                  constants: Constants) -> dict:
    """Failed conditions as name -> (lhs, rhs)."""
    rep = derive_all(params.replace(N=None, p=None))
    Cw = constants.window
    bad = {}
    if T > 1:
        bad["c1"] = (T, 1.0)
    tot = phi_l2 + psi_mod
    if tot > 0 and T > Cw * tot ** rep.c2_exponent:
        bad["c2"] = (T, Cw * tot ** rep.c2_exponent)
    if psi_mod > 0 and T > Cw * psi_mod ** rep.c3_exponent:
        bad["c3"] = (T, Cw * psi_mod ** rep.c3_exponent)
    return bad


def perturbed_solve(phi: SpectralField, psi: SpectralField, T: float, cfg: SolverConfig,
                    constants: Constants | None = None, w: WindowFamily | None = None,
                    check: bool = True):
    """Solve for v (full equation from phi) and w (interaction) on [0, T].

    w solves w = i int e^{i(t-s)Laplace} mu |x|^-b [N(v + e^{is Laplace}psi + w) - N(v)] ds,
    the sum of the two G terms.  Returns ``(v, w)`` sampled on the same
    Picard nodes; ``w.ledger`` carries the iteration history and the ball
    radius A.
    """
    params = cfg.params
    constants = constants or cfg.constants
    w = w or WindowFamily(cfg.grid)
    psi_mod = smooth_norm(psi, params, w)
    if check:
        bad = _check_window(params, T, lp_norm(phi, 2), psi_mod, constants)
        if bad:
            raise WindowConditionError(bad)
    grid = cfg.grid
    S = cfg.picard.substeps
    h = T / S
    sub = max(1, math.ceil(h / cfg.dt - 1e-9))
    v = splitstep_solve(phi, cfg.replace(T=T, dt=h / sub, save_every=sub))
    if v.blowup:
        raise NonContractionError(math.inf, [{"event": "blowup in v", "t": v.blowup_time}])
    times = v.times
    weight = cfg.weight()
    a, mu = params.alpha, params.mu
    Psi = _to_values(grid, np.array([psi.hat * propagator_symbol(grid, t) for t in times]))
    V = v.fields
    zero = np.zeros(grid.shape, complex)
    base = g_difference(V, Psi, zero, a)  # G(v, e^{is Laplace} psi)
    wk = np.zeros_like(V)
    free = np.zeros_like(V)
    history, prev, bad_runs = [], None, 0
    for it in range(1, cfg.picard.max_iters + 1):
        src = mu * weight.values * (g_difference(V + Psi, wk, zero, a) + base)
        new = _to_values(grid, duhamel(free, _to_hat(grid, src), grid, h))
        diff = _x1_norm(new - wk, times, grid, params)
        scale = _x1_norm(new, times, grid, params)
        ratio = diff / prev if prev else None
        history.append({"iter": it, "diff": diff, "ratio": ratio})
        wk = new
        if diff <= cfg.picard.contraction_tol * max(scale, 1e-300) or scale == 0:
            break
        if ratio is not None and ratio > 1:
            bad_runs += 1
            if bad_runs >= 2:
                raise NonContractionError(ratio, history)
        else:
            bad_runs = 0
        prev = diff
    wt = Trajectory(grid, times, wk)
    _ledger(wt, params, weight, ("mass",))
    n = params.n
    wt.ledger["picard"] = history
    wt.ledger["A"] = 3 / constants.window * T ** (n * a / (4 * (a + 2))) * psi_mod
    q = 4 * params.r / (n * a)
    wt.ledger["y_norm"] = _time_norm(wt.norms(params.r), times, q)
    return v, wt


@dataclass
class RunLedger:
    N: float
    T: float
    beta: float
    split: dict
    rows: list = field(default_factory=list)
    events: list = field(default_factory=list)

    columns = ("k", "T", "t_start", "phi_l2", "w_linf_l2", "psi_mod", "c2_margin", "seam_error",
               "phi_chain_bound", "telescoped_bound", "chain_ok")


def global_run(u0: SpectralField, N: float, horizon: float, cfg: SolverConfig,
               constants: Constants | None = None, w: WindowFamily | None = None,
               escalate: bool = False, max_doublings: int = 6):
    """Windowed high-low iteration up to ``horizon``; returns (trajectory, RunLedger).

    With ``escalate=True`` a window-condition failure doubles N and restarts
    the run (recorded as an event); otherwise the failure propagates with
    its step index.
    """
    constants = constants or cfg.constants
    w = w or WindowFamily(cfg.grid)
    events = []
    for _ in range(max_doublings + 1):
        try:
            traj, led = _global_once(u0, N, horizon, cfg, constants, w)
            led.events = events + led.events
            return traj, led
        except WindowConditionError as exc:
            if not escalate:
                raise
            events.append({"event": "escalate", "N": N, "step": exc.step, "detail": str(exc)})
            N *= 2
    raise WindowConditionError({"escalation": (N, N)}, None)


def _global_once(u0, N, horizon, cfg, constants, w):
    params = cfg.params.replace(N=N)
    rep = derive_all(params, constants=constants)
    T, beta = rep.T_N, rep.beta
    sp = split(u0, N, params, w, constants.split)
    led = RunLedger(N, T, beta, sp.summary())
    grid = cfg.grid
    n, a = params.n, params.alpha
    growth = n * a / (4 * (a + 2))
    K = max(1, math.ceil(horizon / T - 1e-9))
    phi = sp.phi
    phi0_l2 = sp.phi_l2
    chain = phi0_l2
    times, frames = [], []
    prev_end = None
    for k in range(K):
        t0 = k * T
        Tk = min(T, horizon - t0)
        psi_k = propagate(sp.psi, t0)
        phi_l2 = lp_norm(phi, 2)
        psi_mod = smooth_norm(psi_k, params, w)
        margin = 3 * constants.window * N**beta - (phi_l2 + psi_mod)
        if margin < 0:
            led.events.append({"event": "c2_failure_branch", "step": k,
                               "lhs": 3 * constants.window * N**beta,
                               "rhs": phi_l2 + psi_mod})
        try:
            v, wt = perturbed_solve(phi, psi_k, Tk, cfg.replace(params=params), constants, w)
        except WindowConditionError as exc:
            exc.step = k
            raise
        Psi = _to_values(grid, np.array([sp.psi.hat * propagator_symbol(grid, t0 + t)
                                         for t in v.times]))
        U = v.fields + wt.fields + Psi
        start = SpectralField(grid, U[0])
        seam = 0.0 if prev_end is None else lp_norm(start - prev_end, 2) / max(lp_norm(start, 2), 1e-300)
        w_sup = float(wt.norms(2).max())
        led.rows.append({
            "k": k, "T": Tk, "t_start": t0, "phi_l2": phi_l2, "w_linf_l2": w_sup,
            "psi_mod": psi_mod, "c2_margin": margin, "seam_error": seam,
            "phi_chain_bound": chain,
            "telescoped_bound": constants.split * N**beta + T**growth * k * constants.split / N,
            "chain_ok": bool(phi_l2 <= chain * (1 + 1e-12) + 1e-300),
        })
        chain += w_sup
        skip = 0 if k == 0 else 1
        times.extend(t0 + v.times[skip:])
        frames.extend(U[skip:])
        prev_end = SpectralField(grid, U[-1])
        phi = SpectralField(grid, v.fields[-1] + wt.fields[-1])
    traj = Trajectory(grid, np.array(times), np.array(frames))
    _ledger(traj, params, cfg.weight(), ("mass", "energy"))
    return traj, led
