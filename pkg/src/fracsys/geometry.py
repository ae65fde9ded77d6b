"""Discretized domains: cell-centered grids, boundary distance, exterior weights.

Functions on a domain are plain ``numpy`` arrays indexed like ``domain.nodes``
and are understood to vanish everywhere outside the domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

# Surface measure of the unit sphere in R^N.
SPHERE_MEASURE = {1: 2.0, 2: 2.0 * math.pi}

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


@dataclass(frozen=True, eq=False)
class GridDomain:
    """Uniform cell-centered sampling of a bounded domain in R^1 or R^2.

    ``collar_nodes`` are cell centers outside the domain that fill the box
    ``exterior_box`` (2D only); beyond that box the exterior is integrated
    analytically.  ``zero_points`` are points on the boundary, where every
    zero-extended function vanishes; they are used by sup-type pair scans.
    """

    dim: int
    kind: str
    nodes: np.ndarray
    interior_mask: np.ndarray
    spacing: float
    boundary_distance: np.ndarray
    diameter: float
    collar_nodes: np.ndarray
    zero_points: np.ndarray
    bounds: tuple = ()
    center: np.ndarray | None = None
    radius: float | None = None
    exterior_box: tuple | None = None
    collar_width: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("nodes", "interior_mask", "boundary_distance", "collar_nodes", "zero_points"):
            arr = getattr(self, name)
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def measure(self) -> float:
        """Discrete |Omega|: total volume of the cells."""
        return self.n * self.cell_volume

    @cached_property
    def _inradius(self):
        return inradius_and_argmax(self)

    @property
    def inradius(self) -> float:
        return self._inradius[0]

    @property
    def argmax_node(self) -> int:
        return self._inradius[1]

    @cached_property
    def pair_distance(self) -> np.ndarray:
        """Node-to-node distances with ``inf`` on the diagonal."""
        x = self.nodes
        d = np.sqrt(((x[:, None, :] - x[None, :, :]) ** 2).sum(axis=-1))
        np.fill_diagonal(d, np.inf)
        d.setflags(write=False)
        return d

    @cached_property
    def pair_index(self) -> tuple[np.ndarray, np.ndarray]:
        """Row and column indices of the unordered pairs i < j, in row-major order."""
        i, j = np.triu_indices(self.n, k=1)
        i.setflags(write=False)
        j.setflags(write=False)
        return i, j

    @cached_property
    def pair_log_distance(self) -> np.ndarray:
        """log |x_i - x_j| for the pairs of ``pair_index``."""
        i, j = self.pair_index
        ld = 0.5 * np.log(((self.nodes[i] - self.nodes[j]) ** 2).sum(axis=1))
        ld.setflags(write=False)
        return ld

    @cached_property
    def zero_distance(self) -> np.ndarray:
        """Distance from each node to the nearest boundary sample point."""
        if len(self.zero_points) == 0:
            return np.full(self.n, np.inf)
        out = np.empty(self.n)
        for start in range(0, self.n, 512):
            chunk = self.nodes[start:start + 512]
            d = np.sqrt(((chunk[:, None, :] - self.zero_points[None, :, :]) ** 2).sum(axis=-1))
            out[start:start + 512] = d.min(axis=1)
        return out


def _check_finite(*values):
    for v in values:
        if not np.all(np.isfinite(v)):
            raise ValueError(f"non-finite geometric parameter: {v!r}")


def build_interval(a: float, b: float, n: int) -> GridDomain:
    """``n`` cell centers of a uniform partition of (a, b)."""
    _check_finite(a, b)
    if not a < b:
        raise ValueError(f"need a < b, got ({a}, {b})")
    if n < 3:
        raise ValueError(f"need at least 3 cells, got n={n}")
    h = (b - a) / n
    x = a + h * (np.arange(n) + 0.5)
    return _interval_domain(a, b, x, h)


def interval_from_nodes(a: float, b: float, points, spacing: float) -> GridDomain:
    """1D domain on arbitrary sample points of [a, b] with quadrature weight ``spacing``.

    Points equal to ``a`` or ``b`` are boundary nodes (not interior); functions
    must vanish there.
    """
    _check_finite(a, b, spacing)
    x = np.asarray(points, dtype=float).ravel()
    if not a < b or spacing <= 0:
        raise ValueError("need a < b and spacing > 0")
    if np.any(x < a) or np.any(x > b):
        raise ValueError("sample points must lie in [a, b]")
    return _interval_domain(a, b, np.sort(x), spacing)


def _interval_domain(a, b, x, h):
    dist = np.minimum(x - a, b - x)
    return GridDomain(
        dim=1,
        kind="interval",
        nodes=x[:, None].copy(),
        interior_mask=dist > 0,
        spacing=float(h),
        boundary_distance=dist,
        diameter=float(b - a),
        collar_nodes=np.empty((0, 1)),
        zero_points=np.array([[a], [b]], dtype=float),
        bounds=(float(a), float(b)),
    )


def _lattice(lo, count, h):
    return lo + h * (np.arange(count) + 0.5)


def build_disk(center, radius: float, h: float, collar_width: float) -> GridDomain:
    """Cell centers of a uniform grid clipped to the open disk.

    The exterior collar is the set of grid cells outside the disk inside the
    largest lattice square around the center whose corner cells still lie
    within ``collar_width`` of the disk; everything beyond that square is
    integrated exactly by :func:`exterior_tail`.
    """
    c = np.asarray(center, dtype=float).ravel()
    _check_finite(c, radius, h, collar_width)
    if c.shape != (2,):
        raise ValueError("disk center must be a 2-vector")
    if radius <= 0:
        raise ValueError("radius must be positive")
    if not 0 < h < radius / 4:
        raise ValueError(f"need 0 < h < radius/4, got h={h}")
    if collar_width < 2 * radius:
        raise ValueError(f"collar_width must be >= diameter {2 * radius}, got {collar_width}")

    m = int(math.floor((radius + collar_width) / (math.sqrt(2.0) * h)))
    ticks = _lattice(-m * h, 2 * m, h)
    gx, gy = np.meshgrid(ticks, ticks, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()]) + c
    rho = np.sqrt(((pts - c) ** 2).sum(axis=1))
    inside = rho < radius
    nodes = pts[inside]
    dist = radius - rho[inside]

    n_theta = max(64, int(math.ceil(4 * math.pi * radius / h)))
    theta = 2 * math.pi * np.arange(n_theta) / n_theta
    zero_pts = c + radius * np.column_stack([np.cos(theta), np.sin(theta)])

    half = m * h
    return GridDomain(
        dim=2,
        kind="disk",
        nodes=nodes,
        interior_mask=np.ones(len(nodes), dtype=bool),
        spacing=float(h),
        boundary_distance=dist,
        diameter=2.0 * radius,
        collar_nodes=pts[~inside],
        zero_points=zero_pts,
        center=c,
        radius=float(radius),
        exterior_box=(c - half, c + half),
        collar_width=float(collar_width),
    )


def build_box(lower, upper, h: float, collar_width: float) -> GridDomain:
    """Cell centers of the rectangle ``lower < x < upper``; side lengths must be multiples of h.

    The collar is the frame of cells around the rectangle whose width is the
    largest multiple of h keeping its corner cells within ``collar_width``.
    """
    lo = np.asarray(lower, dtype=float).ravel()
    hi = np.asarray(upper, dtype=float).ravel()
    _check_finite(lo, hi, h, collar_width)
    if lo.shape != (2,) or hi.shape != (2,) or np.any(hi <= lo):
        raise ValueError("box needs 2-vectors with lower < upper")
    counts = (hi - lo) / h
    if h <= 0 or np.any(np.abs(counts - np.round(counts)) > 1e-9) or np.any(counts < 3):
        raise ValueError(f"h={h} must divide each side into at least 3 cells")
    diameter = float(np.hypot(*(hi - lo)))
    if collar_width < diameter:
        raise ValueError(f"collar_width must be >= diameter {diameter}, got {collar_width}")
    counts = np.round(counts).astype(int)
    mc = int(math.floor(collar_width / (math.sqrt(2.0) * h)))

    tx = _lattice(lo[0] - mc * h, counts[0] + 2 * mc, h)
    ty = _lattice(lo[1] - mc * h, counts[1] + 2 * mc, h)
    gx, gy = np.meshgrid(tx, ty, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    inside = np.all((pts > lo) & (pts < hi), axis=1)
    nodes = pts[inside]
    dist = np.minimum(nodes - lo, hi - nodes).min(axis=1)

    edges = []
    for axis in range(2):
        k = int(math.ceil(2 * (hi[axis] - lo[axis]) / h))
        t = np.linspace(lo[axis], hi[axis], k + 1)
        for fixed in (lo[1 - axis], hi[1 - axis]):
            e = np.empty((k + 1, 2))
            e[:, axis] = t
            e[:, 1 - axis] = fixed
            edges.append(e)
    zero_pts = np.unique(np.vstack(edges), axis=0)

    return GridDomain(
        dim=2,
        kind="box",
        nodes=nodes,
        interior_mask=np.ones(len(nodes), dtype=bool),
        spacing=float(h),
        boundary_distance=dist,
        diameter=diameter,
        collar_nodes=pts[~inside],
        zero_points=zero_pts,
        bounds=(lo, hi),
        exterior_box=(lo - mc * h, hi + mc * h),
        collar_width=float(collar_width),
    )


def inradius_and_argmax(domain: GridDomain) -> tuple[float, int]:
    """Largest boundary distance over the nodes and the node attaining it.

    Near-ties (within 1e-12 relative) go to the lexicographically smallest
    coordinate so the result does not depend on rounding in symmetric grids.
    """
    bd = domain.boundary_distance
    top = bd.max()
    cand = np.flatnonzero(bd >= top - 1e-12 * max(top, 1.0))
    coords = domain.nodes[cand]
    order = np.lexsort(coords.T[::-1])
    return float(top), int(cand[order[0]])


@dataclass(frozen=True)
class TailWeights:
    """Per-node exterior integral of |x - y|^-(N + t p), split by how it is computed."""

    collar: np.ndarray
    tail: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.collar + self.tail

    @property
    def tail_share(self) -> np.ndarray:
        return self.tail / self.total


def _box_exterior_integral(x: np.ndarray, lo, hi, tau: float) -> np.ndarray:
    """Exact integral of |x-y|^-(2+tau) over the complement of the box, for x inside it.

    In polar coordinates around x this is (1/tau) * int rho(theta)^-tau dtheta,
    rho(theta) being the distance to the box boundary along the ray.  Each face
    contributes d^-tau * int cos(phi)^tau dphi over the angles hitting it.
    """
    d = np.column_stack([hi[0] - x[:, 0], hi[1] - x[:, 1], x[:, 0] - lo[0], x[:, 1] - lo[1]])
    total = np.zeros(len(x))
    # face k has normal distance d[:, k] and its two neighbours bound the angular range
    for k in range(4):
        dn = d[:, k]
        left = d[:, (k + 1) % 4]
        right = d[:, (k - 1) % 4]
        t0 = -np.arctan(right / dn)
        t1 = np.arctan(left / dn)
        mid = 0.5 * (t0 + t1)
        half = 0.5 * (t1 - t0)
        phi = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        integral = half * (np.cos(phi) ** tau @ _GL_WEIGHTS)
        total += dn ** (-tau) * integral
    return total / tau


NEAR_CELLS = 6
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _cell_integral(x: np.ndarray, c: np.ndarray, h: float, tau: float) -> np.ndarray:
    """Integral of |x - y|^-(2+tau) over the square cell of side h centered at c (x outside it).

    Polar coordinates around x: (1/tau) int (rho_in^-tau - rho_out^-tau) dtheta over the
    sector the cell subtends, split at the corner directions so that each piece has
    fixed entry and exit faces.
    """
    offsets = 0.5 * h * np.array([[1, 1], [-1, 1], [-1, -1], [1, -1]])
    rel = c - x
    axis = np.arctan2(rel[:, 1], rel[:, 0])
    corners = rel[:, None, :] + offsets[None, :, :]
    phi = np.arctan2(corners[..., 1], corners[..., 0]) - axis[:, None]
    phi = (phi + np.pi) % (2 * np.pi) - np.pi
    phi.sort(axis=1)
    lo = rel - 0.5 * h
    hi = rel + 0.5 * h
    total = np.zeros(len(x))
    for k in range(3):
        a, b = phi[:, k], phi[:, k + 1]
        theta = axis[:, None] + 0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * _GL_NODES[None, :]
        e = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = lo[:, None, :] / e
            t2 = hi[:, None, :] / e
        t_in = np.nanmax(np.minimum(t1, t2), axis=-1)
        t_out = np.nanmin(np.maximum(t1, t2), axis=-1)
        vals = (t_in ** (-tau) - t_out ** (-tau)) / tau
        total += 0.5 * (b - a) * (vals @ _GL_WEIGHTS)
    return total


def exterior_tail(domain: GridDomain, t: float, p: float) -> TailWeights:
    """Integral over the exterior of the domain of |x_i - y|^-(N + t p) dy.

    1D: closed form ((x-a)^-tp + (b-x)^-tp) / tp.  2D: midpoint quadrature over
    the collar cells plus the exact integral outside the collar box.  Nodes on
    the boundary get ``inf``.
    """
    tau = t * p
    if not tau > 0:
        raise ValueError(f"t*p must be positive, got {tau}")
    n = domain.n
    if domain.dim == 1:
        a, b = domain.bounds
        x = domain.nodes[:, 0]
        with np.errstate(divide="ignore"):
            tail = ((x - a) ** (-tau) + (b - x) ** (-tau)) / tau
        return TailWeights(collar=np.zeros(n), tail=tail)

    lo, hi = domain.exterior_box
    tail = _box_exterior_integral(domain.nodes, lo, hi, tau)
    collar = np.empty(n)
    y = domain.collar_nodes
    m = domain.dim + tau
    h = domain.spacing
    for start in range(0, n, 256):
        chunk = domain.nodes[start:start + 256]
        z = chunk[:, None, :] - y[None, :, :]
        r2 = (z**2).sum(axis=-1)
        # midpoint rule with its leading correction (h^2/24) * Laplacian of |z|^-m = m^2 |z|^-(m+2)
        k = r2 ** (-m / 2) * (1.0 + (h * h / 24.0) * m * m / r2) * h * h
        # exact cell integrals on a band of NEAR_CELLS cells beyond each node's closest collar cell
        zinf = np.abs(z).max(axis=-1)
        near = zinf <= zinf.min(axis=1, keepdims=True) + NEAR_CELLS * h + 1e-12
        ii, jj = np.nonzero(near)
        k[ii, jj] = _cell_integral(chunk[ii], y[jj], h, tau)
        collar[start:start + 256] = k.sum(axis=1)
    return TailWeights(collar=collar, tail=tail)


def log_exterior_tail(domain: GridDomain, t: float, p: float) -> np.ndarray:
    """Natural log of ``exterior_tail(...).total``, evaluated without overflow in 1D."""
    tau = t * p
    if domain.dim == 1:
        if not tau > 0:
            raise ValueError(f"t*p must be positive, got {tau}")
        a, b = domain.bounds
        x = domain.nodes[:, 0]
        with np.errstate(divide="ignore"):
            return np.logaddexp(-tau * np.log(x - a), -tau * np.log(b - x)) - math.log(tau)
    with np.errstate(divide="ignore"):
        return np.log(exterior_tail(domain, t, p).total)


def radial_tail(radius, t: float, p: float, dim: int) -> np.ndarray:
    """Integral of |z|^-(N + t p) over |z| > radius: sigma_N radius^-tp / (t p)."""
    tau = t * p
    return SPHERE_MEASURE[dim] * np.asarray(radius, dtype=float) ** (-tau) / tau
