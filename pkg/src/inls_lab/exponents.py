"""Closed-form exponents and hypotheses for the INLS well-posedness theory.

Everything downstream (solver windows, split targets, the global iteration)
reads its exponents from :func:`derive_all`.  Unnamed constants of the
analysis live in :class:`Constants` and default to 1.0.

Infinity is carried as ``math.inf`` and compares normally.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

__all__ = [
    "ProblemParams",
    "Constants",
    "ExponentReport",
    "Verdict",
    "HypothesisError",
    "critical_index",
    "b_tilde",
    "admissible",
    "check_hypotheses",
    "local_time_exponent",
    "beta_of_p",
    "beta_for",
    "beta_range",
    "window_length",
    "derive_all",
]

inf = math.inf


class HypothesisError(ValueError):
    """Raised when (n, alpha, b, p, N) violate a hypothesis of the theory.

    ``diagnostics`` lists every failed inequality, one string each.
    """

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


@dataclass(frozen=True)
class ProblemParams:
    n: int
    alpha: float
    b: float
    mu: int = 1
    p: float | None = None
    N: float | None = None

    def __post_init__(self):
        if self.mu not in (1, -1):
            raise ValueError(f"mu must be +1 or -1, got {self.mu}")

    @property
    def r(self) -> float:
        """Modulation exponent alpha + 2 of the smooth part."""
        return self.alpha + 2.0

    @property
    def r_conj(self) -> float:
        return (self.alpha + 2.0) / (self.alpha + 1.0)

    def mass_subcritical(self) -> bool:
        return 0 < self.alpha < (4 - 2 * self.b) / self.n

    def replace(self, **kw) -> "ProblemParams":
        d = asdict(self)
        d.update(kw)
        return ProblemParams(**d)


@dataclass(frozen=True)
class Constants:
    """The analysis' implicit constants, threaded explicitly.

    local:  C(n, alpha, b) in the local existence time.
    ball:   C(n, alpha) in the contraction radius a = C ||u0||.
    window: C of the perturbed-equation conditions (c2), (c3) and of T(N).
    split:  C of the interpolation split bounds.
    """

    local: float = 1.0
    ball: float = 1.0
    window: float = 1.0
    split: float = 1.0


@dataclass(frozen=True)
class Verdict:
    admissible: bool
    endpoint: bool = False
    reason: str = ""

    def __bool__(self):
        return self.admissible


def critical_index(params: ProblemParams) -> float:
    """s_b = n/2 - (2 - b)/alpha."""
    if params.alpha == 0:
        raise ValueError("alpha = 0 has no critical index")
    return params.n / 2 - (2 - params.b) / params.alpha


def b_tilde(n: int) -> tuple[float, bool]:
    """Upper limit for b and whether it is excluded (strict only for n = 2)."""
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    if n == 1:
        return (3 - math.sqrt(7)) / 2, False
    if n == 2:
        return 2 - math.sqrt(2), True
    return (n + 6 - math.sqrt((n + 6) ** 2 - 32)) / 4, False


def _inv(x: float) -> float:
    return 0.0 if math.isinf(x) else 1.0 / x


def admissible(q: float, r: float, n: int, rtol: float = 1e-12) -> Verdict:
    """Schroedinger-admissibility: 1/q = (n/2)(1/2 - 1/r) with r in range."""
    if q < 1 or r < 1:
        return Verdict(False, reason="exponents below 1")
    lhs, rhs = _inv(q), n / 2 * (0.5 - _inv(r))
    if not math.isclose(lhs, rhs, rel_tol=rtol, abs_tol=rtol):
        return Verdict(False, reason=f"1/q={lhs:.15g} != (n/2)(1/2-1/r)={rhs:.15g}")
    if r < 2 * (1 - rtol):
        return Verdict(False, reason="r < 2")
    if n >= 3:
        top = 2 * n / (n - 2)
        if r > top * (1 + rtol):
            return Verdict(False, reason=f"r > 2n/(n-2) = {top:.15g}")
        return Verdict(True, endpoint=math.isclose(r, top, rel_tol=rtol))
    if n == 2 and math.isinf(r):
        return Verdict(False, reason="r = inf excluded for n = 2")
    return Verdict(True)


def check_hypotheses(params: ProblemParams, *, need_global: bool = False) -> list:
    """Every failed hypothesis as a human-readable inequality."""
    n, a, b = params.n, params.alpha, params.b
    out = []
    if not n >= 1:
        out.append(f"n >= 1 fails (n={n})")
        return out
    if not 0 < b < min(2, n):
        out.append(f"0 < b < min(2, n) fails (b={b}, n={n})")
    if not a > 0:
        out.append(f"alpha > 0 fails (alpha={a})")
    elif not a < (4 - 2 * b) / n:
        out.append(f"alpha < (4 - 2b)/n fails (alpha={a}, bound={(4 - 2 * b) / n:.15g})")
    bt, strict = b_tilde(n)
    if strict and not b < bt:
        out.append(f"b < b_tilde(n) fails (b={b}, b_tilde={bt:.15g})")
    elif not strict and not b <= bt:
        out.append(f"b <= b_tilde(n) fails (b={b}, b_tilde={bt:.15g})")
    if out:
        return out
    if params.p is not None or need_global:
        if params.p is None:
            out.append("modulation exponent p is required")
        else:
            pmax = beta_range(params)[1]
            if not 2 < params.p < pmax:
                out.append(f"2 < p < p_max fails (p={params.p}, p_max={pmax:.15g})")
    if params.N is not None and not params.N > 1:
        out.append(f"N > 1 fails (N={params.N})")
    return out


def local_time_exponent(params: ProblemParams) -> float:
    """1/q1 = (4-2b-n a)/4 - n(4-2b-n a)/(4(n+2-b)(a+2)), the T-power of the ball piece."""
    n, a, b = params.n, params.alpha, params.b
    d = 4 - 2 * b - n * a
    return d / 4 - n * d / (4 * (n + 2 - b) * (a + 2))


def _branch_denominator(params: ProblemParams) -> float:
    n, a = params.n, params.alpha
    return a - n * a**2 / (4 * (a + 2)) - local_time_exponent(params)


def beta_of_p(p: float, r: float) -> float:
    """beta = (1/2 - 1/p)/(1/p - 1/r), evaluated as (p-2) r / (2 (r-p)).

    The rearranged form avoids cancellation for p near 2 or near r.
    """
    return (p - 2) * r / (2 * (r - p))


def beta_for(params: "ProblemParams") -> float:
    """beta at r = alpha + 2 with r - p formed as alpha - (p - 2), exact when p is near r."""
    p, a = params.p, params.alpha
    return (p - 2) * (a + 2) / (2 * (a - (p - 2)))


def beta_range(params: ProblemParams) -> tuple[float, float, str]:
    """(eta or inf, p_max, branch) for the admissible beta range."""
    n, a, b = params.n, params.alpha, params.b
    zeta = local_time_exponent(params)
    den = _branch_denominator(params)
    if den > 0:
        eta = zeta / den
        pmax = (4 * a + 8 - n * a) / (
            2 * a + 2 + b + n * (4 - 2 * b - n * a) / (2 * (a + 2) * (n + 2 - b))
        )
        return eta, pmax, "eta"
    return inf, a + 2, "unbounded"


def window_length(params: ProblemParams, N: float, beta: float, C: float = 1.0) -> float:
    """T(N) = (3 C N^beta)^(-alpha/zeta)."""
    return (3 * C * N**beta) ** (-params.alpha / local_time_exponent(params))


@dataclass
class ExponentReport:
    n: int
    alpha: float
    b: float
    mu: int
    p: float | None
    N: float | None
    s_b: float
    b_tilde: float
    b_tilde_strict: bool
    rho1: float
    gamma1: float
    gamma1_conj: float
    gamma2: float
    rho2: float
    pair2_endpoint: bool
    inv_q1: float
    y_pair: tuple
    source_exponents: tuple
    c2_exponent: float
    c3_exponent: float
    growth_exponent: float
    branch: str
    eta: float
    p_max: float
    beta: float | None = None
    n_power: float | None = None
    T_N: float | None = None
    A: float | None = None
    a: float | None = None
    T_local: float | None = None
    c1: bool | None = None
    c2: bool | None = None
    c3: bool | None = None
    admissibility: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def enc(v):
            if isinstance(v, float) and math.isinf(v):
                return "inf" if v > 0 else "-inf"
            if isinstance(v, tuple):
                return [enc(x) for x in v]
            if isinstance(v, dict):
                return {k: enc(x) for k, x in v.items()}
            return v

        return {k: enc(v) for k, v in asdict(self).items()}

    def table(self) -> str:
        rows = []
        for k, v in self.to_dict().items():
            if isinstance(v, float):
                v = f"{v:.17g}"
            rows.append(f"{k:<20} {v}")
        return "\n".join(rows)


def derive_all(params: ProblemParams, norms: dict | None = None,
               constants: Constants | None = None) -> ExponentReport:
    """Evaluate every exponent for ``params``.

    ``norms`` may carry ``u0`` (sum-space norm of the data), ``phi`` (L^2 norm
    of the rough part), ``psi`` (M^{a+2,(a+2)'} norm of the smooth part) and
    ``T`` (a window to test against (c1)-(c3)).
    """
    diag = check_hypotheses(params)
    if diag:
        raise HypothesisError(diag)
    norms = norms or {}
    C = constants or Constants()
    n, a, b = params.n, params.alpha, params.b

    bt, strict = b_tilde(n)
    rho1 = a + 2
    gamma1_conj = 4 * (a + 2) / (4 * (a + 2) - n * a)
    gamma1 = 4 * (a + 2) / (n * a)
    g2_den = 2 * n + 4 * b + b * n - 2 * b**2
    r2_den = n**2 - 2 * n * b - 4 * b + 2 * b**2
    gamma2 = 4 * (n + 2 - b) / g2_den
    # n = 1 at b = b_tilde puts rho2 at infinity; treat round-off zeros as exact
    if abs(r2_den) <= 1e-13 * (n**2 + 2 * n * b + 4 * b + 2 * b**2):
        rho2 = inf
    else:
        rho2 = 2 * n * (n + 2 - b) / r2_den
    zeta = local_time_exponent(params)
    eta, pmax, branch = beta_range(params)

    adm = {
        "pair1": admissible(gamma1, rho1, n),
        "pair2": admissible(gamma2, rho2, n),
        "y_pair": admissible(gamma1, rho1, n),
    }
    rep = ExponentReport(
        n=n, alpha=a, b=b, mu=params.mu, p=params.p, N=params.N,
        s_b=critical_index(params),
        b_tilde=bt, b_tilde_strict=strict,
        rho1=rho1, gamma1=gamma1, gamma1_conj=gamma1_conj,
        gamma2=gamma2, rho2=rho2, pair2_endpoint=adm["pair2"].endpoint,
        inv_q1=zeta,
        y_pair=(gamma1, rho1),
        source_exponents=(1 - n * a / 4, zeta),
        c2_exponent=-a / zeta,
        c3_exponent=-a / (zeta + n * a**2 / (4 * (a + 2))),
        growth_exponent=n * a / (4 * (a + 2)),
        branch=branch, eta=eta, p_max=pmax,
        admissibility={k: v.admissible for k, v in adm.items()},
        constants=asdict(C),
    )
    if params.p is not None:
        rep.beta = beta_for(params)
        rep.n_power = 1 - rep.beta * (-1 + a * (1 - n * a / (4 * (a + 2))) / zeta)
        if params.N is not None:
            rep.T_N = window_length(params, params.N, rep.beta, C.window)
    if "u0" in norms:
        u0 = norms["u0"]
        rep.a = C.ball * u0
        rep.T_local = min(1.0, C.local * u0 ** (-a / zeta)) if u0 > 0 else 1.0
    T = norms.get("T", rep.T_N)
    if T is not None and "psi" in norms:
        psi = norms["psi"]
        rep.A = 3 / C.window * T ** (n * a / (4 * (a + 2))) * psi
        rep.c1 = T <= 1
        rep.c3 = psi == 0 or T <= C.window * psi ** rep.c3_exponent
        if "phi" in norms:
            tot = norms["phi"] + psi
            rep.c2 = tot == 0 or T <= C.window * tot ** rep.c2_exponent
    return rep
