"""Hoelder seminorms, the limit eigenvalue and the limit viscosity operators.

Sup/inf scans run over node pairs plus the boundary sample points of the
domain (where zero-extended functions vanish) and, for the operators
L^{+-}, the far-field value 0 that (w(x) - 0) / |x - y|^t approaches as
|y| -> infinity.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energy import FracParams
from .eigensolver import init_cone
from .geometry import GridDomain


def _pair_quotients(domain: GridDomain, w: np.ndarray, t: float) -> np.ndarray:
    """(w_i - w_j) / |x_i - x_j|^t as a full matrix with zero diagonal."""
    d = domain.pair_distance
    q = (w[:, None] - w[None, :]) / d**t
    np.fill_diagonal(q, 0.0)
    return q


def holder_seminorm(domain: GridDomain, w, t: float) -> float:
    """max |w(x) - w(y)| / |x - y|^t over distinct nodes and node/boundary pairs."""
    if not 0 < t < 1:
        raise ValueError(f"t must lie in (0, 1), got {t}")
    w = np.asarray(w, dtype=float)
    i, j = domain.pair_index
    inner = np.abs(w[i] - w[j]) / np.exp(t * domain.pair_log_distance)
    zd = domain.zero_distance
    on_boundary = zd == 0
    if np.any(w[on_boundary] != 0):
        raise ValueError("zero-extended function must vanish on boundary nodes")
    with np.errstate(divide="ignore", invalid="ignore"):
        edge = np.where(on_boundary, 0.0, np.abs(w) / zd**t)
    return float(max(inner.max(initial=0.0), edge.max(initial=0.0)))


def lambda_infinity_geometric(domain: GridDomain, gamma: float, r: float, s: float) -> float:
    """(1 / R)^((1 - gamma) s + gamma r) with R the inradius of the domain."""
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    return float((1.0 / domain.inradius) ** ((1 - gamma) * s + gamma * r))


def lambda_infinity_variational(domain: GridDomain, u, v, gamma: float, r: float, s: float) -> float:
    """max([u]_{r,inf}, [v]_{s,inf}) / max_i |u_i|^gamma |v_i|^(1-gamma)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    denom = float((np.abs(u) ** gamma * np.abs(v) ** (1 - gamma)).max())
    if denom == 0:
        raise ValueError("|u|^gamma |v|^(1-gamma) vanishes identically: inadmissible pair")
    return max(holder_seminorm(domain, u, r), holder_seminorm(domain, v, s)) / denom


def viscosity_ops_all(domain: GridDomain, w, t: float):
    """L^+ w, L^- w and L w = L^+ w + L^- w at every node."""
    w = np.asarray(w, dtype=float)
    q = _pair_quotients(domain, w, t)
    np.fill_diagonal(q, np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        near = np.where(domain.zero_distance > 0, w / domain.zero_distance**t, np.nan)
    far = np.zeros_like(w)
    # nearest boundary point maximizes |w_i| / |x_i - y|^t; the far field supplies 0
    lplus = np.fmax(np.fmax(np.nanmax(q, axis=1, initial=-np.inf), near), far)
    lminus = np.fmin(np.fmin(np.nanmin(q, axis=1, initial=np.inf), near), far)
    return lplus, lminus, lplus + lminus


def viscosity_ops(domain: GridDomain, w, t: float, node: int):
    """(L^+ w, L^- w, L w) at one interior node."""
    if not domain.interior_mask[node]:
        raise ValueError(f"node {node} is not interior")
    lp, lm, lsum = viscosity_ops_all(domain, w, t)
    return float(lp[node]), float(lm[node]), float(lsum[node])


def limit_residual_field(domain: GridDomain, u, v, gamma: float, r: float, s: float, Lambda: float):
    """Pointwise min(L w, L^+ w - Lambda u^gamma v^(1-gamma)) for w = u (order r) and w = v (order s)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(u < 0) or np.any(v < 0):
        raise ValueError("limit residual needs nonnegative u and v")
    source = Lambda * u**gamma * v ** (1 - gamma)
    out = []
    for w, t in ((u, r), (v, s)):
        lplus, _, lsum = viscosity_ops_all(domain, w, t)
        out.append(np.minimum(lsum, lplus - source))
    return out[0], out[1]


def limit_residual(domain: GridDomain, u, v, gamma: float, r: float, s: float, Lambda: float, nodes=None):
    """Sup over interior nodes (or the given ``nodes``) of the absolute limit residuals."""
    ru, rv = limit_residual_field(domain, u, v, gamma, r, s, Lambda)
    sel = np.flatnonzero(domain.interior_mask) if nodes is None else np.atleast_1d(nodes)
    return float(np.abs(ru[sel]).max()), float(np.abs(rv[sel]).max())


@dataclass
class InfinityResult:
    lambda_inf_geometric: float
    lambda_inf_variational: float
    gamma: float
    r: float
    s: float
    inradius: float
    argmax_node: int
    u0: np.ndarray
    v0: np.ndarray


def extremal_analysis(domain: GridDomain, gamma: float, r: float, s: float) -> InfinityResult:
    """Geometric limit eigenvalue next to the variational quotient of the extremal cone pair."""
    u0, v0 = init_cone(domain, FracParams(r, s, 2.0, gamma))
    return InfinityResult(
        lambda_inf_geometric=lambda_infinity_geometric(domain, gamma, r, s),
        lambda_inf_variational=lambda_infinity_variational(domain, u0, v0, gamma, r, s),
        gamma=gamma,
        r=r,
        s=s,
        inradius=domain.inradius,
        argmax_node=domain.argmax_node,
        u0=u0,
        v0=v0,
    )
