import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracsys import infinity
from fracsys.eigensolver import init_cone
from fracsys.energy import FracParams
from fracsys.geometry import build_disk, build_interval, interval_from_nodes


@pytest.fixture(scope="module")
def grid():
    """Grid containing the incenter 0.5 and both endpoints."""
    return interval_from_nodes(0.0, 1.0, np.linspace(0.0, 1.0, 101), 0.01)


def pair_scan(x, w, t):
    """Loop over all ordered node pairs; boundary nodes carry w = 0."""
    best = 0.0
    for i in range(len(x)):
        for j in range(len(x)):
            if i != j:
                best = max(best, abs(w[i] - w[j]) / abs(x[i] - x[j]) ** t)
    return best


def cone(dom, t):
    return np.clip(1.0 - np.abs(dom.nodes[:, 0] - 0.5) / 0.5, 0.0, None) ** t


def test_holder_zero_and_cone(grid):
    assert infinity.holder_seminorm(grid, np.zeros(grid.n), 0.5) == 0.0
    w = cone(grid, 0.5)
    val = infinity.holder_seminorm(grid, w, 0.5)
    assert val == pytest.approx(2**0.5, abs=1e-12)
    assert val == pytest.approx(pair_scan(grid.nodes[:, 0], w, 0.5), abs=1e-12)


def test_holder_includes_boundary_on_cell_centered_grid(rng):
    dom = build_interval(0.0, 1.0, 9)
    w = rng.uniform(0.0, 1.0, dom.n)
    x = np.concatenate([[0.0], dom.nodes[:, 0], [1.0]])
    ref = pair_scan(x, np.concatenate([[0.0], w, [0.0]]), 0.4)
    assert infinity.holder_seminorm(dom, w, 0.4) == pytest.approx(ref, rel=1e-13)


def test_holder_rejects_bad_order(grid):
    with pytest.raises(ValueError):
        infinity.holder_seminorm(grid, np.zeros(grid.n), 1.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 0.95), st.floats(1e-3, 1e3))
def test_holder_homogeneous_and_subadditive(seed, t, c):
    dom = build_interval(0.0, 1.0, 15)
    rng = np.random.default_rng(seed)
    u, w = rng.standard_normal(dom.n), rng.standard_normal(dom.n)
    hu, hw = infinity.holder_seminorm(dom, u, t), infinity.holder_seminorm(dom, w, t)
    assert infinity.holder_seminorm(dom, c * u, t) == pytest.approx(c * hu, rel=1e-12)
    assert infinity.holder_seminorm(dom, u + w, t) <= hu + hw + 1e-12 * (hu + hw)


def test_lambda_geometric_values():
    dom = build_interval(0.0, 1.0, 161)
    R = dom.inradius
    assert infinity.lambda_infinity_geometric(dom, 0.5, 0.3, 0.6) == pytest.approx((1 / R) ** 0.45)
    exact = interval_from_nodes(0.0, 1.0, np.linspace(0, 1, 11), 0.1)
    assert infinity.lambda_infinity_geometric(exact, 0.5, 0.3, 0.6) == pytest.approx(1.366040, abs=5e-7)
    for gamma in (0.1, 0.5, 0.9):
        assert infinity.lambda_infinity_geometric(exact, gamma, 0.5, 0.5) == pytest.approx(1.414214, abs=5e-7)
    disk = build_disk((0.0, 0.0), 1.0, 0.1, 2.0)
    unit = 1.0 / disk.inradius
    # R = 1 up to the grid: value 1 up to the same factor
    assert infinity.lambda_infinity_geometric(disk, 0.3, 0.2, 0.7) == pytest.approx(1.0, abs=unit**0.7 - 1 + 1e-12)


@pytest.mark.parametrize("r, s, gamma", [(0.5, 0.5, 0.5), (0.3, 0.6, 0.5), (0.2, 0.7, 0.3), (0.8, 0.1, 0.6)])
def test_cone_identities(grid, r, s, gamma):
    u0, v0 = init_cone(grid, FracParams(r, s, 2.0, gamma))
    lam = infinity.lambda_infinity_geometric(grid, gamma, r, s)
    assert abs(infinity.holder_seminorm(grid, u0, r) - lam) <= 1e-9
    assert abs(infinity.holder_seminorm(grid, v0, s) - lam) <= 1e-9
    assert abs((u0**gamma * v0 ** (1 - gamma)).max() - 1.0) <= 1e-12
    assert abs(infinity.lambda_infinity_variational(grid, u0, v0, gamma, r, s) - lam) <= 1e-9


def test_variational_lower_bound(grid, rng):
    lam = infinity.lambda_infinity_geometric(grid, 0.5, 0.3, 0.6)
    for _ in range(100):
        u = np.where(grid.interior_mask, rng.uniform(0.0, 1.0, grid.n), 0.0)
        v = np.where(grid.interior_mask, rng.uniform(0.0, 1.0, grid.n), 0.0)
        assert infinity.lambda_infinity_variational(grid, u, v, 0.5, 0.3, 0.6) >= lam - 1e-9


def test_variational_scale_invariance_and_errors(grid, rng):
    u = np.where(grid.interior_mask, rng.uniform(0.1, 1.0, grid.n), 0.0)
    v = np.where(grid.interior_mask, rng.uniform(0.1, 1.0, grid.n), 0.0)
    a = infinity.lambda_infinity_variational(grid, u, v, 0.4, 0.3, 0.6)
    assert infinity.lambda_infinity_variational(grid, 7 * u, 7 * v, 0.4, 0.3, 0.6) == pytest.approx(a, rel=1e-12)
    with pytest.raises(ValueError):
        infinity.lambda_infinity_variational(grid, np.zeros(grid.n), v, 0.4, 0.3, 0.6)


def test_viscosity_ops_examples(grid):
    k = int(np.argmin(np.abs(grid.nodes[:, 0] - 0.5)))
    assert infinity.viscosity_ops(grid, np.zeros(grid.n), 0.5, k) == (0.0, 0.0, 0.0)
    w = cone(grid, 0.5)
    lp, lm, L = infinity.viscosity_ops(grid, w, 0.5, k)
    assert lp == pytest.approx(2**0.5, abs=1e-12)
    assert lm == 0.0
    assert L == lp + lm
    with pytest.raises(ValueError):
        infinity.viscosity_ops(grid, w, 0.5, 0)


def test_viscosity_ops_composition_and_max_node(rng):
    dom = build_interval(0.0, 1.0, 25)
    w = rng.uniform(0.0, 1.0, dom.n)
    lp, lm, L = infinity.viscosity_ops_all(dom, w, 0.6)
    np.testing.assert_array_equal(L, lp + lm)
    assert np.all(lp >= lm)
    k = int(np.argmax(w))
    assert lp[k] >= 0 and lm[k] == 0.0


def test_viscosity_ops_match_brute_force(rng):
    dom = build_interval(0.0, 1.0, 12)
    w = rng.uniform(0.0, 1.0, dom.n)
    x = dom.nodes[:, 0]
    lp, lm, _ = infinity.viscosity_ops_all(dom, w, 0.5)
    for i in range(dom.n):
        cand = [(w[i] - w[j]) / abs(x[i] - x[j]) ** 0.5 for j in range(dom.n) if j != i]
        cand += [w[i] / abs(x[i] - y) ** 0.5 for y in (0.0, 1.0)]
        cand.append(0.0)
        assert lp[i] == pytest.approx(max(cand), rel=1e-13)
        assert lm[i] == pytest.approx(min(cand), rel=1e-13, abs=1e-15)


@pytest.mark.parametrize("r, s, gamma", [(0.5, 0.5, 0.5), (0.3, 0.6, 0.5)])
def test_cone_residual_vanishes_at_apex(grid, r, s, gamma):
    res = infinity.extremal_analysis(grid, gamma, r, s)
    ru, rv = infinity.limit_residual(grid, res.u0, res.v0, gamma, r, s, res.lambda_inf_geometric,
                                     nodes=res.argmax_node)
    assert ru <= 1e-9 and rv <= 1e-9


def test_limit_residual_rejects_negative(grid):
    w = -cone(grid, 0.5)
    with pytest.raises(ValueError):
        infinity.limit_residual(grid, w, w, 0.5, 0.5, 0.5, 1.0)


def test_extremal_analysis_fields(grid):
    res = infinity.extremal_analysis(grid, 0.5, 0.3, 0.6)
    assert res.inradius == pytest.approx(0.5)
    assert res.lambda_inf_geometric == pytest.approx(2**0.45)
    assert res.lambda_inf_variational == pytest.approx(res.lambda_inf_geometric, abs=1e-9)
