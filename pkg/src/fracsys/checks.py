"""Randomized property suites behind ``fracsys selftest``."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import energy, infinity
from .eigensolver import init_cone, scaling_polynomial_check
from .energy import FracParams
from .geometry import build_interval, interval_from_nodes


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def picone_suite(seed: int, samples: int = 10_000, powers=(2.0, 2.5, 3.0, 4.0)) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = np.inf
    for p in powers:
        phi = rng.uniform(0.0, 1.0, (samples, 2))
        psi = rng.uniform(0.05, 1.0, (samples, 2))
        vals = energy.picone(phi.ravel(), psi.ravel(), p, np.arange(2 * samples).reshape(-1, 2))
        worst = min(worst, float(vals.min()))
    return CheckResult("picone", worst >= -1e-10, f"min L = {worst:.3e} over {samples} pairs x p in {list(powers)}")


def poincare_suite(seed: int, functions: int = 100, combos=((0.5, 2.0), (0.3, 4.0), (0.8, 3.0))) -> CheckResult:
    rng = np.random.default_rng(seed)
    dom = build_interval(0.0, 1.0, 41)
    worst = np.inf
    for t, p in combos:
        for _ in range(functions):
            w = rng.standard_normal(dom.n) * (rng.random(dom.n) < 0.7)
            if not np.any(w):
                w[rng.integers(dom.n)] = 1.0
            lhs, rhs, _ = energy.poincare_check(dom, w, t, p)
            worst = min(worst, lhs / rhs)
    return CheckResult("poincare", worst >= 1.0, f"min lhs/rhs = {worst:.4g} over {functions} x {len(combos)} cases")


def finite_difference_gradient(dom, w, t, p, step=1e-6) -> np.ndarray:
    """Central differences of seminorm_p / (p h^N)."""
    out = np.empty(dom.n)
    for k in range(dom.n):
        e = np.zeros(dom.n)
        e[k] = step
        hi = energy.seminorm_p(dom, w + e, t, p)
        lo = energy.seminorm_p(dom, w - e, t, p)
        out[k] = (hi - lo) / (2 * step)
    return out / (p * dom.cell_volume)


def gradient_suite(seed: int, functions: int = 20, powers=(2.0, 3.0)) -> CheckResult:
    rng = np.random.default_rng(seed)
    dom = build_interval(0.0, 1.0, 15)
    worst = 0.0
    for p in powers:
        for _ in range(functions):
            w = rng.uniform(-1.0, 1.0, dom.n)
            g = energy.frac_p_laplacian_apply(dom, w, 0.5, p)
            fd = finite_difference_gradient(dom, w, 0.5, p)
            worst = max(worst, float(np.abs(g - fd).max() / np.abs(g).max()))
    return CheckResult("gradient", worst <= 1e-5, f"max rel err = {worst:.2e}")


def embedding_suite(seed: int, functions: int = 50) -> CheckResult:
    rng = np.random.default_rng(seed)
    dom = build_interval(0.0, 1.0, 41)
    ok = all(
        energy.embedding_check(dom, rng.standard_normal(dom.n), 0.9, 40.0, 20.0) for _ in range(functions)
    )
    ok = ok and energy.embedding_check(dom, np.full(dom.n, 3.0), 0.9, 40.0, 20.0)
    return CheckResult("embedding", ok, f"{functions} random functions, s=0.9 p=40 q=20")


def cone_suite(seed: int) -> CheckResult:
    """Extremal cone identities on a grid that contains the incenter and the endpoints."""
    dom = interval_from_nodes(0.0, 1.0, np.linspace(0.0, 1.0, 101), 0.01)
    worst = 0.0
    for r, s, gamma in ((0.5, 0.5, 0.5), (0.3, 0.6, 0.5), (0.2, 0.7, 0.3)):
        u0, v0 = init_cone(dom, FracParams(r, s, 2.0, gamma))
        lam = infinity.lambda_infinity_geometric(dom, gamma, r, s)
        worst = max(
            worst,
            abs(infinity.holder_seminorm(dom, u0, r) - lam),
            abs(infinity.holder_seminorm(dom, v0, s) - lam),
            abs(infinity.lambda_infinity_variational(dom, u0, v0, gamma, r, s) - lam),
        )
    return CheckResult("cone identities", worst <= 1e-9, f"max deviation = {worst:.2e}")


def scaling_suite(seed: int, cases: int = 50) -> CheckResult:
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(cases):
        p = rng.uniform(2.0, 64.0)
        alpha = rng.uniform(1.0, p - 1.0)
        a = rng.uniform(0.1, 10.0)
        b = a * (p - alpha) / alpha
        ok &= scaling_polynomial_check(a, b, p, alpha)
    return CheckResult("scaling polynomial", bool(ok), f"{cases} random (a, b, p, alpha)")


SUITES = (picone_suite, poincare_suite, gradient_suite, embedding_suite, cone_suite, scaling_suite)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("FRACSYS_THREADS", os.cpu_count() or 1)))
    except ValueError:
        return 1


def run_selftest(seed: int = 0, workers: int | None = None) -> list[CheckResult]:
    workers = workers or worker_count()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(suite, seed + k) for k, suite in enumerate(SUITES)]
        return [f.result() for f in futures]
