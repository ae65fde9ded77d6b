"""Acceptance criteria, one test each, at the stated tolerances."""
import math

import numpy as np
import pytest

from fracsys import energy, infinity
from fracsys.checks import finite_difference_gradient
from fracsys.eigensolver import init_cone, minimize_rayleigh, scaling_polynomial_check, simplicity_probe
from fracsys.energy import FracParams
from fracsys.geometry import build_interval, interval_from_nodes

from oracles import brute_force_quotient, p2_pencil_lambda


def test_c01_limit_convergence_symmetric(symmetric_sweep, report):
    recs = symmetric_sweep.records
    target = 2**0.5
    final = recs[-1]
    close = abs(final.lambda_root - target) <= 0.15 and final.p == 64
    errs = [r.abs_err for r in recs if r.p >= 8]
    monotone = all(b <= a for a, b in zip(errs, errs[1:]))
    detail = (f"|lambda_64^(1/64) - 2^(1/2)| = {final.abs_err:.4f} (<= 0.15: {close}); "
              f"abs_err for p>=8 = {[round(e, 4) for e in errs]} non-increasing: {monotone}")
    assert report(1, "limit convergence", close and monotone, detail)


def test_c02_limit_convergence_asymmetric(asymmetric_sweep, report):
    final = asymmetric_sweep.records[-1]
    target = 2**0.45
    err = abs(final.lambda_root - target)
    assert report(2, "asymmetric exponents", err <= 0.15 and final.p == 64,
                  f"lambda_64^(1/64) = {final.lambda_root:.6f}, target {target:.6f}, err {err:.4f}")


def test_c03_linear_case_oracle(report):
    dom = build_interval(0.0, 1.0, 161)
    prm = FracParams(0.5, 0.5, 2.0, 0.5)
    pair = minimize_rayleigh(dom, prm, init_cone(dom, prm))
    ref = p2_pencil_lambda(dom.nodes[:, 0], 0.0, 1.0, dom.spacing, 0.5)
    rel = abs(pair.lam / ref - 1)
    assert report(3, "p=2 dense pencil oracle", rel <= 1e-6,
                  f"solver {pair.lam:.12g} vs 2*mu_1 {ref:.12g}, rel err {rel:.2e}")


def test_c04_brute_force_oracle(report):
    dom = build_interval(0.0, 1.0, 5)
    prm = FracParams(0.5, 0.5, 3.0, 0.5)
    pair = minimize_rayleigh(dom, prm, init_cone(dom, prm))
    best = brute_force_quotient(dom.nodes[:, 0], 0.0, 1.0, dom.spacing, 0.5, 0.5, 3.0, 0.5, budget=1_000_000)
    rel = abs(pair.lam - best) / best
    assert report(4, "brute-force oracle", rel <= 0.05,
                  f"solver {pair.lam:.8g} vs random-search min {best:.8g} (1e6 samples), rel {rel:.2e}")


def test_c05_picone(report):
    rng = np.random.default_rng(2024)
    worst = math.inf
    for p in (2.0, 2.5, 4.0):
        phi = rng.uniform(0.0, 1.0, (10_000, 2))
        psi = rng.uniform(1e-3, 1.0, (10_000, 2))
        vals = energy.picone(phi.ravel(), psi.ravel(), p, np.arange(20_000).reshape(-1, 2))
        worst = min(worst, float(vals.min()))
    assert report(5, "Picone inequality", worst >= -1e-10, f"min L = {worst:.3e} over 3 x 10^4 pairs")


def test_c06_poincare(report):
    rng = np.random.default_rng(7)
    dom = build_interval(0.0, 1.0, 41)
    failures = 0
    worst = math.inf
    for t, p in ((0.5, 2.0), (0.3, 4.0), (0.8, 3.0)):
        for _ in range(100):
            w = rng.standard_normal(dom.n)
            lhs, rhs, holds = energy.poincare_check(dom, w, t, p)
            failures += not holds
            worst = min(worst, lhs / rhs)
    assert report(6, "Poincare (corrected constant)", failures == 0,
                  f"{300 - failures}/300 hold, min lhs/rhs = {worst:.3g}")


def test_c07_gradient_fidelity(report):
    rng = np.random.default_rng(11)
    dom = build_interval(0.0, 1.0, 15)
    worst = 0.0
    for p in (2.0, 3.0):
        for _ in range(20):
            w = rng.uniform(-1.0, 1.0, dom.n)
            g = energy.frac_p_laplacian_apply(dom, w, 0.5, p)
            fd = finite_difference_gradient(dom, w, 0.5, p)
            worst = max(worst, float(np.abs(g - fd).max() / np.abs(g).max()))
    assert report(7, "gradient fidelity", worst <= 1e-5, f"max rel err {worst:.2e} over 40 functions")


def test_c08_extremal_identities(report):
    dom = interval_from_nodes(0.0, 1.0, np.linspace(0.0, 1.0, 101), 0.01)
    worst_semi = worst_norm = worst_var = 0.0
    for r, s, gamma in ((0.5, 0.5, 0.5), (0.3, 0.6, 0.5), (0.2, 0.7, 0.3)):
        u0, v0 = init_cone(dom, FracParams(r, s, 2.0, gamma))
        lam = infinity.lambda_infinity_geometric(dom, gamma, r, s)
        worst_semi = max(worst_semi, abs(infinity.holder_seminorm(dom, u0, r) - lam),
                         abs(infinity.holder_seminorm(dom, v0, s) - lam))
        worst_norm = max(worst_norm, abs((u0**gamma * v0 ** (1 - gamma)).max() - 1.0))
        worst_var = max(worst_var, abs(infinity.lambda_infinity_variational(dom, u0, v0, gamma, r, s) - lam))
    ok = worst_semi <= 1e-9 and worst_norm <= 1e-12 and worst_var <= 1e-9
    assert report(8, "extremal identities", ok,
                  f"seminorm dev {worst_semi:.1e}, sup-norm dev {worst_norm:.1e}, variational dev {worst_var:.1e}")


def test_c09_lower_bound(report):
    rng = np.random.default_rng(99)
    dom = interval_from_nodes(0.0, 1.0, np.linspace(0.0, 1.0, 101), 0.01)
    gap = math.inf
    for k in range(200):
        r, s = rng.uniform(0.05, 0.95, 2)
        gamma = rng.uniform(0.05, 0.95)
        kind = k % 4
        if kind == 3:
            # the extremal pair itself: the bound is attained
            u, v = init_cone(dom, FracParams(r, s, 2.0, gamma))
        elif kind == 0:
            u, v = rng.uniform(0.0, 1.0, (2, dom.n))
        elif kind == 1:
            u, v = init_cone(dom, FracParams(r, s, 2.0, gamma))
            u = u * rng.uniform(0.8, 1.2, dom.n)
            v = v * rng.uniform(0.8, 1.2, dom.n)
        else:
            c = rng.uniform(0.1, 0.9)
            width = rng.uniform(0.05, 0.5)
            base = np.clip(1 - np.abs(dom.nodes[:, 0] - c) / width, 0.0, None)
            u, v = base ** rng.uniform(0.05, 1.0), base ** rng.uniform(0.05, 1.0)
        u = np.where(dom.interior_mask, u, 0.0)
        v = np.where(dom.interior_mask, v, 0.0)
        lam = infinity.lambda_infinity_geometric(dom, gamma, r, s)
        gap = min(gap, infinity.lambda_infinity_variational(dom, u, v, gamma, r, s) - lam)
    assert report(9, "variational lower bound", gap >= -1e-9, f"min(variational - geometric) = {gap:.3e} over 200 pairs")


def test_c10_limit_residual(symmetric_sweep, report):
    dom = symmetric_sweep.domain
    lam_inf = symmetric_sweep.records[-1].lambda_inf
    ru, rv = symmetric_sweep.residual_u, symmetric_sweep.residual_v
    grid = interval_from_nodes(0.0, 1.0, np.linspace(0.0, 1.0, 101), 0.01)
    res = infinity.extremal_analysis(grid, 0.5, 0.5, 0.5)
    au, av = infinity.limit_residual(grid, res.u0, res.v0, 0.5, 0.5, 0.5, res.lambda_inf_geometric,
                                     nodes=res.argmax_node)
    ok = symmetric_sweep.pairs[-1].params.p == 64 and max(ru, rv) <= 0.1 * lam_inf and max(au, av) <= 1e-9
    assert report(10, "limit residual", ok,
                  f"p=64 residuals ({ru / lam_inf:.4f}, {rv / lam_inf:.4f}) x Lambda on n={dom.n}; "
                  f"cone apex residual {max(au, av):.1e}")


def test_c11_positivity_and_simplicity(symmetric_sweep, asymmetric_sweep, report):
    positive = all(
        np.all(pair.u[pair.domain.interior_mask] > 0) and np.all(pair.v[pair.domain.interior_mask] > 0)
        for sweep in (symmetric_sweep, asymmetric_sweep) for pair in sweep.pairs if pair.converged
    )
    dom = build_interval(0.0, 1.0, 81)
    dist = simplicity_probe(dom, FracParams(0.5, 0.5, 8.0, 0.5), trials=3)
    assert report(11, "positivity and simplicity", positive and dist <= 1e-3,
                  f"all converged pairs positive: {positive}; simplicity distance {dist:.2e}")


def test_c12_scaling_polynomial(report):
    rng = np.random.default_rng(5)
    ok = 0
    for _ in range(50):
        p = rng.uniform(2.0, 64.0)
        alpha = rng.uniform(1.0, p - 1.0)
        a = rng.uniform(0.1, 10.0)
        ok += scaling_polynomial_check(a, a * (p - alpha) / alpha, p, alpha)
    assert report(12, "scaling polynomial", ok == 50, f"{ok}/50 random cases pass")
