"""Discrete fractional energies of zero-extended grid functions.

Seminorms are midpoint sums over ordered node pairs plus the interaction of
each node with the exterior, where the function is zero:

    [w]^p = sum_{i != j} |w_i - w_j|^p K_ij h^2N + 2 sum_i |w_i|^p T_i h^N,

with K_ij = |x_i - x_j|^-(N + t p) and T_i the exterior weight from
:func:`fracsys.geometry.exterior_tail`.  Above ``LOG_DOMAIN_P`` every p-th
power is accumulated as a log-sum-exp.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from .geometry import SPHERE_MEASURE, GridDomain, exterior_tail, log_exterior_tail

LOG_DOMAIN_P = 32.0


@dataclass(frozen=True)
class FracParams:
    r: float
    s: float
    p: float
    gamma: float

    @property
    def alpha(self) -> float:
        return self.gamma * self.p

    @property
    def beta(self) -> float:
        # p - alpha rather than (1 - gamma) p so that alpha + beta == p exactly
        return self.p - self.alpha

    def validate(self, dim: int | None = None) -> "FracParams":
        """Raise ``ValueError`` unless the exponents are admissible.

        With ``dim`` given, also require p * min(r, s) >= dim (needed for the
        large-p limit).
        """
        for name in ("r", "s", "gamma"):
            val = getattr(self, name)
            if not 0 < val < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {val}")
        if not self.p > 1:
            raise ValueError(f"p must exceed 1, got {self.p}")
        if min(self.alpha, self.beta) < 1 - 1e-12:
            raise ValueError(
                f"min(alpha, beta) = {min(self.alpha, self.beta):.6g} < 1; "
                f"need p >= {1 / min(self.gamma, 1 - self.gamma):.6g}"
            )
        if dim is not None and self.p * min(self.r, self.s) < dim - 1e-12:
            raise ValueError(f"p*min(r,s) = {self.p * min(self.r, self.s):.6g} < N = {dim}")
        return self

    def with_p(self, p: float) -> "FracParams":
        return FracParams(self.r, self.s, p, self.gamma)


def _check(domain: GridDomain, w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (domain.n,):
        raise ValueError(f"function has shape {w.shape}, domain has {domain.n} nodes")
    if not np.all(np.isfinite(w)):
        raise ValueError("grid function has non-finite values")
    return w


@lru_cache(maxsize=64)
def _log_exterior(domain: GridDomain, t: float, p: float) -> np.ndarray:
    out = log_exterior_tail(domain, t, p)
    out.setflags(write=False)
    return out


def _pair_diff(domain: GridDomain, w: np.ndarray) -> np.ndarray:
    i, j = domain.pair_index
    return w[i] - w[j]


def _log_terms(domain: GridDomain, w: np.ndarray, t: float, p: float, include_exterior: bool):
    """Differences and logs of the pair terms (each unordered pair counted twice) and exterior terms."""
    N, h = domain.dim, domain.spacing
    diff = _pair_diff(domain, w)
    with np.errstate(divide="ignore"):
        pair = p * np.log(np.abs(diff)) - (N + t * p) * domain.pair_log_distance + (
            math.log(2.0) + 2 * N * math.log(h)
        )
        if include_exterior:
            ext = math.log(2.0) + p * np.log(np.abs(w)) + _log_exterior(domain, t, p) + N * math.log(h)
            ext = np.where(w == 0, -np.inf, ext)
        else:
            ext = np.full(domain.n, -np.inf)
    return diff, pair, ext


def log_seminorm_p(domain: GridDomain, w, t: float, p: float, include_exterior: bool = True) -> float:
    """Natural log of :func:`seminorm_p`; ``-inf`` for the zero function."""
    w = _check(domain, w)
    _, pair, ext = _log_terms(domain, w, t, p, include_exterior)
    return float(logsumexp(np.concatenate([pair, ext])))


def seminorm_p(domain: GridDomain, w, t: float, p: float, include_exterior: bool = True) -> float:
    """Discrete [w]_{t,p}^p (``include_exterior``) or the Omega x Omega part |w|_{t,p}^p."""
    w = _check(domain, w)
    if p > LOG_DOMAIN_P:
        val = math.exp(log_seminorm_p(domain, w, t, p, include_exterior))
        if math.isinf(val):
            raise OverflowError(f"seminorm overflows at p={p}; use log_seminorm_p")
        return val
    N, h = domain.dim, domain.spacing
    diff = _pair_diff(domain, w)
    kern = np.exp(-(N + t * p) * domain.pair_log_distance)
    total = 2.0 * (np.abs(diff) ** p * kern).sum() * h ** (2 * N)
    if include_exterior:
        mask = w != 0
        tail = exterior_tail(domain, t, p).total
        total += 2.0 * (np.abs(w[mask]) ** p * tail[mask]).sum() * h**N
    return float(total)


def log_coupling(domain: GridDomain, u, v, params: FracParams) -> float:
    u, v = _check(domain, u), _check(domain, v)
    with np.errstate(divide="ignore"):
        terms = params.alpha * np.log(np.abs(u)) + params.beta * np.log(np.abs(v))
    return float(logsumexp(terms) + domain.dim * math.log(domain.spacing))


def coupling(domain: GridDomain, u, v, params: FracParams) -> float:
    """sum_i |u_i|^alpha |v_i|^beta h^N."""
    return math.exp(log_coupling(domain, u, v, params))


def log_rayleigh(domain: GridDomain, u, v, params: FracParams) -> float:
    lb = log_coupling(domain, u, v, params)
    if lb == -math.inf:
        raise ValueError("coupling vanishes (u v == 0): inadmissible pair")
    la = np.logaddexp(
        log_seminorm_p(domain, u, params.r, params.p),
        log_seminorm_p(domain, v, params.s, params.p),
    )
    return float(la - lb)


def rayleigh(domain: GridDomain, u, v, params: FracParams) -> float:
    """([u]_{r,p}^p + [v]_{s,p}^p) / |(u,v)|_{alpha,beta}^p, evaluated in logs."""
    return math.exp(log_rayleigh(domain, u, v, params))


def _scatter(domain: GridDomain, c: np.ndarray) -> np.ndarray:
    """Antisymmetric pair quantity c_ij (i < j) summed into row sums sum_j c_ij."""
    i, j = domain.pair_index
    return np.bincount(i, c, domain.n) - np.bincount(j, c, domain.n)


def frac_p_laplacian_apply(domain: GridDomain, w, t: float, p: float) -> np.ndarray:
    """Discrete (p,t)-Laplacian: the gradient of [w]_{t,p}^p divided by p h^N.

    g_i = 2 sum_j |w_i-w_j|^(p-2) (w_i-w_j) K_ij h^N + 2 |w_i|^(p-2) w_i T_i
    """
    w = _check(domain, w)
    N, h = domain.dim, domain.spacing
    diff = _pair_diff(domain, w)
    with np.errstate(divide="ignore", over="ignore"):
        lpair = (p - 1) * np.log(np.abs(diff)) - (N + t * p) * domain.pair_log_distance + N * math.log(h)
        pair = np.sign(diff) * np.exp(lpair)
        lext = (p - 1) * np.log(np.abs(w)) + _log_exterior(domain, t, p)
        ext = np.where(w == 0, 0.0, np.sign(w) * np.exp(lext))
    g = 2.0 * _scatter(domain, pair) + 2.0 * ext
    if not np.all(np.isfinite(g)):
        raise FloatingPointError(f"fractional p-Laplacian overflowed at p={p}")
    return g


def log_energy_grad(domain: GridDomain, w: np.ndarray, t: float, p: float, curvature: bool = False):
    """(log [w]^p, d log [w]^p / dw) without forming any p-th power explicitly.

    With ``curvature`` also returns E''_ii / E, the diagonal of the energy
    Hessian relative to the energy (used for gradient scaling).
    """
    diff, pair, ext = _log_terms(domain, w, t, p, include_exterior=True)
    top = max(pair.max(initial=-np.inf), ext.max())
    if top == -np.inf:
        zero = np.zeros(domain.n)
        return (-math.inf, zero, zero) if curvature else (-math.inf, zero)
    ep = np.exp(pair - top)
    ee = np.exp(ext - top)
    total = ep.sum() + ee.sum()
    log_e = float(top + math.log(total))
    nz = diff != 0
    cp = np.zeros_like(diff)
    cp[nz] = ep[nz] / diff[nz]
    wz = w != 0
    ce = np.zeros_like(w)
    ce[wz] = ee[wz] / w[wz]
    grad = p * (_scatter(domain, cp) + ce) / total
    if not curvature:
        return log_e, grad
    i, j = domain.pair_index
    cp[nz] /= diff[nz]
    ce[wz] /= w[wz]
    diag = p * (p - 1) * (np.bincount(i, cp, domain.n) + np.bincount(j, cp, domain.n) + ce) / total
    return log_e, grad, diag


def picone(phi, psi, p: float, pairs) -> np.ndarray:
    """Picone functional L(phi, psi)(x, y) for each index pair (x, y).

    L = |phi_x - phi_y|^p - spow(psi_x - psi_y, p-1) (phi_x^p / psi_x^(p-1) - phi_y^p / psi_y^(p-1))
    with spow(a, q) = |a|^q sign(a).  Nonnegative whenever phi >= 0 and psi > 0.
    """
    phi = np.asarray(phi, dtype=float)
    psi = np.asarray(psi, dtype=float)
    idx = np.asarray(pairs, dtype=int).reshape(-1, 2)
    i, j = idx[:, 0], idx[:, 1]
    if np.any(psi[idx.ravel()] <= 0):
        raise ValueError("psi must be strictly positive on every listed node")
    if np.any(phi[idx.ravel()] < 0):
        raise ValueError("phi must be nonnegative on every listed node")
    dpsi = psi[i] - psi[j]
    ratio_i = phi[i] ** p / psi[i] ** (p - 1)
    ratio_j = phi[j] ** p / psi[j] ** (p - 1)
    return np.abs(phi[i] - phi[j]) ** p - np.sign(dpsi) * np.abs(dpsi) ** (p - 1) * (ratio_i - ratio_j)


def lp_norm_p(domain: GridDomain, w, p: float) -> float:
    """sum_i |w_i|^p h^N."""
    w = _check(domain, w)
    return float((np.abs(w) ** p).sum() * domain.cell_volume)


def poincare_constant(domain: GridDomain, t: float, p: float) -> float:
    """sigma_N / (t p) * (diam + 1)^(-t p): the exterior mass beyond distance diam + 1."""
    tau = t * p
    return SPHERE_MEASURE[domain.dim] / tau * (domain.diameter + 1.0) ** (-tau)


def poincare_check(domain: GridDomain, w, t: float, p: float):
    """Compare [w]_{t,p}^p against poincare_constant * ||w||_p^p; returns (lhs, rhs, holds)."""
    w = _check(domain, w)
    if not np.any(w):
        raise ValueError("Poincare check needs a nonzero function")
    lhs = seminorm_p(domain, w, t, p, include_exterior=True)
    rhs = poincare_constant(domain, t, p) * lp_norm_p(domain, w, p)
    return lhs, rhs, bool(lhs >= rhs)


def embedding_check(domain: GridDomain, w, s: float, p: float, q: float) -> bool:
    """Check both discrete inclusion inequalities for q in (N/s, p), t = s - N/q.

    ||w||_q <= |Omega|^(1/q - 1/p) ||w||_p  and
    |w|_{t,q} <= diam^(N/p) |Omega|^(2/q - 2/p) |w|_{s,p}   (Omega x Omega parts)
    """
    w = _check(domain, w)
    N = domain.dim
    if not N / s < q < p:
        raise ValueError(f"need N/s < q < p, got N/s={N / s:.6g}, q={q}, p={p}")
    t = s - N / q
    vol = domain.measure
    slack = 1e-12
    if not np.any(w):
        return True
    lq = lp_norm_p(domain, w, q) ** (1 / q)
    lp = lp_norm_p(domain, w, p) ** (1 / p)
    first = lq <= vol ** (1 / q - 1 / p) * lp * (1 + slack)
    # compare in logs: the p-seminorm can be astronomically large or small
    lhs = log_seminorm_p(domain, w, t, q, include_exterior=False) / q
    rhs = (
        (N / p) * math.log(domain.diameter)
        + (2 / q - 2 / p) * math.log(vol)
        + log_seminorm_p(domain, w, s, p, include_exterior=False) / p
    )
    second = lhs <= rhs + slack
    return bool(first and second)
