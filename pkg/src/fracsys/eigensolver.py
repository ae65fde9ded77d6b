"""First eigenpair by projected gradient descent on the log Rayleigh quotient."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import energy
from .energy import FracParams
from .geometry import GridDomain

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """Raised when the iteration breaks down; ``trace`` holds the objective history."""

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = list(trace)


@dataclass
class SolverOptions:
    max_iterations: int = 20000
    quotient_tol: float = 1e-10
    kkt_tol: float = 1e-6
    initial_step: float = 1.0
    backtrack: float = 0.5
    armijo: float = 1e-4
    seed: int = 0
    # "jacobi": scale the gradient by the diagonal of the energy Hessian; "none": plain gradient
    scaling: str = "jacobi"

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if not (self.quotient_tol > 0 and self.kkt_tol > 0 and self.initial_step > 0 and self.armijo > 0):
            raise ValueError("tolerances and step parameters must be positive")
        if not 0 < self.backtrack < 1:
            raise ValueError("backtrack factor must lie in (0, 1)")
        if self.scaling not in ("jacobi", "none"):
            raise ValueError(f"unknown gradient scaling {self.scaling!r}")


@dataclass
class EigenPair:
    domain: GridDomain
    params: FracParams
    u: np.ndarray
    v: np.ndarray
    lam: float
    kkt_u: float
    kkt_v: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list, repr=False)

    @property
    def log_lam(self) -> float:
        return self.history[-1] if self.history else math.log(self.lam)


class _Objective:
    """Phi(u, v) = log([u]^p + [v]^p) - log coupling(u, v) on the interior nodes."""

    def __init__(self, domain: GridDomain, params: FracParams):
        self.domain = domain
        self.params = params
        self.free = np.flatnonzero(domain.interior_mask)
        self.m = len(self.free)

    def split(self, x):
        n = self.domain.n
        u = np.zeros(n)
        v = np.zeros(n)
        u[self.free] = x[: self.m]
        v[self.free] = x[self.m:]
        return u, v

    def pack(self, u, v):
        return np.concatenate([u[self.free], v[self.free]])

    def normalize(self, x):
        """|x| rescaled so that the coupling equals 1."""
        x = np.abs(x)
        u, v = self.split(x)
        lb = energy.log_coupling(self.domain, u, v, self.params)
        if lb < math.log(1e-300):
            raise SolverError(f"coupling collapsed (log coupling = {lb:.3g})")
        return x * math.exp(-lb / self.params.p)

    def value_grad(self, x):
        """Phi, its gradient, the relative KKT residuals of both equations, and a diagonal metric."""
        d, prm = self.domain, self.params
        u, v = self.split(x)
        la_u, ga_u, cu = energy.log_energy_grad(d, u, prm.r, prm.p, curvature=True)
        la_v, ga_v, cv = energy.log_energy_grad(d, v, prm.s, prm.p, curvature=True)
        la = np.logaddexp(la_u, la_v)
        lb = energy.log_coupling(d, u, v, prm)
        with np.errstate(divide="ignore", invalid="ignore"):
            lu, lv = np.log(np.abs(u)), np.log(np.abs(v))
            base = prm.alpha * lu + prm.beta * lv + d.dim * math.log(d.spacing) - lb
            # d log B / du_i = alpha |u_i|^(alpha-2) u_i |v_i|^beta h^N / B
            gb_u = np.where(u == 0, 0.0, np.sign(u) * prm.alpha * np.exp(base - lu))
            gb_v = np.where(v == 0, 0.0, np.sign(v) * prm.beta * np.exp(base - lv))
        wu, wv = math.exp(la_u - la), math.exp(la_v - la)
        gu = wu * ga_u - gb_u
        gv = wv * ga_v - gb_v
        # dPhi/du_i is proportional to the strong-form residual and d log B/du_i to its right-hand side
        free = self.free
        kkt_u = np.abs(gu[free]).max() / max(np.abs(gb_u[free]).max(), 1e-300)
        kkt_v = np.abs(gv[free]).max() / max(np.abs(gb_v[free]).max(), 1e-300)
        metric = self.pack(wu * cu, wv * cv)
        metric += 1e-8 * metric.max()
        return float(la - lb), self.pack(gu, gv), float(kkt_u), float(kkt_v), metric


def minimize_rayleigh(domain: GridDomain, params: FracParams, init, opts: SolverOptions | None = None) -> EigenPair:
    """Projected gradient descent with Armijo backtracking on the log quotient.

    The search direction is the gradient scaled by the diagonal of the energy
    Hessian (``opts.scaling="jacobi"``) or the plain gradient.  After each step
    the iterate is replaced by its absolute value and rescaled to unit
    coupling; neither operation can increase the quotient.  Trial steps start
    from the Barzilai-Borwein length of the previous iteration.
    """
    opts = opts or SolverOptions()
    obj = _Objective(domain, params)
    u0, v0 = (np.asarray(a, dtype=float) for a in init)
    x = obj.normalize(obj.pack(u0, v0))
    phi, g, ku, kv, metric = obj.value_grad(x)
    if not np.isfinite(phi):
        raise SolverError("initial quotient is not finite", [phi])
    history = [phi]
    step = opts.initial_step
    it = 0
    rel_drop = math.inf
    x_prev = dir_prev = None

    def done():
        return max(ku, kv) < opts.kkt_tol and rel_drop < opts.quotient_tol

    while it < opts.max_iterations and not done():
        direction = g / metric if opts.scaling == "jacobi" else g
        slope = float(g @ direction)
        if slope == 0.0:
            rel_drop = 0.0
            break
        if x_prev is not None:
            sx, sy = x - x_prev, direction - dir_prev
            curv = float(sx @ sy)
            if curv > 0:
                step = float(sx @ sx) / curv
        accepted = False
        while step * np.abs(direction).max() > 1e-15 * np.abs(x).max():
            x_try = obj.normalize(x - step * direction)
            trial = obj.value_grad(x_try)
            if trial[0] <= phi - opts.armijo * step * slope:
                accepted = True
                break
            step *= opts.backtrack
        it += 1
        if not accepted:
            # no representable step decreases Phi: stationary to working precision
            rel_drop = 0.0
            log.debug("line search exhausted at iteration %d (kkt %.3g, %.3g)", it, ku, kv)
            break
        if not np.isfinite(trial[0]):
            raise SolverError(f"objective became non-finite at iteration {it}", history)
        assert trial[0] <= phi, "descent violated"
        rel_drop = -math.expm1(trial[0] - phi)
        x_prev, dir_prev = x, direction
        x = x_try
        phi, g, ku, kv, metric = trial
        history.append(phi)

    converged = done()
    u, v = obj.split(x)
    log.info("p=%g: lambda^(1/p)=%.8g after %d iterations (kkt %.2e, %.2e, converged=%s)",
             params.p, math.exp(phi / params.p), it, ku, kv, converged)
    return EigenPair(domain, params, u, v, math.exp(phi), ku, kv, it, converged, history)


def kkt_residual(pair: EigenPair, params: FracParams | None = None):
    """Sup over interior nodes of the strong-form residuals of both equations.

    res_u = max_i |(-Delta_p)^r u_i - lam (alpha/p) |u_i|^(alpha-2) u_i |v_i|^beta|, and the same
    for v with (s, beta).
    """
    prm = params or pair.params
    d = pair.domain
    u, v, lam = pair.u, pair.v, pair.lam
    free = d.interior_mask
    au, av = np.abs(u), np.abs(v)
    with np.errstate(divide="ignore", invalid="ignore"):
        rhs_u = lam * prm.alpha / prm.p * np.sign(u) * au ** (prm.alpha - 1) * av**prm.beta
        rhs_v = lam * prm.beta / prm.p * np.sign(v) * au**prm.alpha * av ** (prm.beta - 1)
    lu = energy.frac_p_laplacian_apply(d, u, prm.r, prm.p)
    lv = energy.frac_p_laplacian_apply(d, v, prm.s, prm.p)
    res_u = np.nan_to_num(lu - rhs_u)[free]
    res_v = np.nan_to_num(lv - rhs_v)[free]
    return float(np.abs(res_u).max()), float(np.abs(res_v).max())


def init_cone(domain: GridDomain, params: FracParams):
    """Truncated cones of heights R^((r-s)(1-G)) and R^(-(r-s)G) centered at the incenter node."""
    R, k = domain.inradius, domain.argmax_node
    r, s, G = params.r, params.s, params.gamma
    dist = np.sqrt(((domain.nodes - domain.nodes[k]) ** 2).sum(axis=1))
    base = np.clip(1.0 - dist / R, 0.0, None)
    u0 = R ** ((r - s) * (1 - G)) * base**r
    v0 = R ** (-(r - s) * G) * base**s
    return u0, v0


def random_init(domain: GridDomain, rng: np.random.Generator):
    """Independent uniform(0.05, 1) values at interior nodes, zero elsewhere."""
    mask = domain.interior_mask
    u = np.where(mask, rng.uniform(0.05, 1.0, domain.n), 0.0)
    v = np.where(mask, rng.uniform(0.05, 1.0, domain.n), 0.0)
    return u, v


def simplicity_probe(domain: GridDomain, params: FracParams, opts: SolverOptions | None = None,
                     trials: int = 3, seeds=None) -> float:
    """Largest sup-norm distance between minimizers reached from random positive starts."""
    if trials < 2:
        raise ValueError("need at least two trials")
    opts = opts or SolverOptions()
    seeds = list(seeds) if seeds is not None else [opts.seed + k for k in range(trials)]
    pairs = []
    for seed in seeds[:trials]:
        pair = minimize_rayleigh(domain, params, random_init(domain, np.random.default_rng(seed)), opts)
        if not pair.converged:
            raise SolverError(f"simplicity trial with seed {seed} did not converge", pair.history)
        pairs.append(np.concatenate([np.abs(pair.u), np.abs(pair.v)]))
    return max(
        float(np.abs(a - b).max()) for i, a in enumerate(pairs) for b in pairs[i + 1:]
    )


def scaling_polynomial_check(a: float, b: float, p: float, alpha: float, samples: int = 2001) -> bool:
    """f(x) = a x^p - (a+b) x^alpha + b vanishes at 1 and decreases strictly on (0, 1).

    Requires the eigenpair relation a / (a + b) = alpha / p.
    """
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    if abs(a / (a + b) - alpha / p) > 1e-12:
        raise ValueError(f"a/(a+b) = {a / (a + b)!r} differs from alpha/p = {alpha / p!r}")
    x = np.linspace(0.0, 1.0, samples + 2)[1:-1]
    lx = np.log(x)
    f1 = a - (a + b) + b
    # f = b (1 - x^alpha) - a x^alpha (1 - x^(p-alpha)), written with expm1 to keep the
    # second-order zero at x = 1 resolvable
    f = -b * np.expm1(alpha * lx) + a * x**alpha * np.expm1((p - alpha) * lx)
    df = x ** (alpha - 1) * (p * a * x ** (p - alpha) - (a + b) * alpha)
    return bool(abs(f1) <= 1e-12 * (a + b) and np.all(f > 0) and np.all(df < 0))
