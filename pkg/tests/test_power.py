import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import desk_instance, make_links
from rfvlc_alloc.power import (BallProduct, CappedSimplexProduct, _SubProblem, dump_pareto,
                               lambda_grid, link_optimal_y, maximize_concave, optimal_y,
                               orthogonal_start, quad_sinr, sinr_ratio, solve_min_power,
                               solve_rmax, sweep_pareto, transformed_sum_rate,
                               transformed_sum_rate_grad)
from rfvlc_alloc.rates import LinkSet
from rfvlc_alloc.scenario import ScenarioConfig
from rfvlc_alloc.schemes import scg_assignment
from rfvlc_alloc.subchannel import allocate_scg, build_allocation

CFG = ScenarioConfig()


def _random_links(rng, L=6, groups=3):
    a = 10 ** rng.uniform(-11, -9, L)
    B = 10 ** rng.uniform(-13, -11, (L, L)) * (rng.random((L, L)) < 0.5)
    np.fill_diagonal(B, 0.0)
    return make_links(a, B=B, group=rng.integers(0, groups, L), budget=np.ones(groups),
                      noise=CFG.noise_rf, user=rng.integers(0, 3, L), n_users=3)


def _desk_links(seed=0, **kw):
    cfg, st_ = desk_instance(seed, **kw)
    x_rf, x_vlc = scg_assignment(st_, cfg)
    s, a = allocate_scg(x_rf, x_vlc, st_)
    return cfg, LinkSet.from_allocation(build_allocation(x_rf, x_vlc, s, a), st_, cfg)


# quadratic transform ------------------------------------------------------
def test_quad_sinr_examples():
    assert quad_sinr(0.5, 1e-10, 1e-12, 1e-13, 0.0) == 0.0
    assert quad_sinr(0.0, 1e-10, 1e-12, 1e-13, 2.0) == pytest.approx(-4.0 * 1.1e-12)
    with pytest.raises(ValueError):
        quad_sinr(-1.0, 1.0, 0.0, 1.0, 1.0)
    assert optimal_y(0.0, 1e-10, 1e-12, 1e-13) == 0.0
    assert optimal_y(0.5, 1e-10, 0.0, 1e-13) == pytest.approx(math.sqrt(0.5e-10) / 1e-13)


@settings(max_examples=100, deadline=None)
@given(p=st.floats(1e-6, 40.0), g=st.floats(1e-14, 1e-4), i=st.floats(0.0, 1e-9),
       n=st.floats(1e-16, 1e-10))
def test_transform_tight_at_optimal_y(p, g, i, n):
    y = optimal_y(p, g, i, n)
    ratio = sinr_ratio(p, g, i, n)
    assert abs(quad_sinr(p, g, i, n, y) - ratio) <= 1e-9 * ratio
    h = 1e-6 * y
    d = (quad_sinr(p, g, i, n, y + h) - quad_sinr(p, g, i, n, y - h)) / (2 * h)
    assert abs(d) <= 1e-6 * (2 * math.sqrt(p * g))


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(1)
    for _ in range(20):
        links = _random_links(rng)
        p = rng.uniform(0.05, 1.0, links.size)
        y = link_optimal_y(links, p) * rng.uniform(0.5, 1.5, links.size)
        g = transformed_sum_rate_grad(links, p, y)
        for l in range(links.size):
            h = 1e-6 * p[l]
            e = np.zeros(links.size)
            e[l] = h
            fd = (transformed_sum_rate(links, p + e, y) - transformed_sum_rate(links, p - e, y)) / (2 * h)
            assert fd == pytest.approx(g[l], rel=1e-5, abs=1e-6 * np.abs(g).max())


# feasible sets and the maximizer -------------------------------------------
def test_ball_projection():
    s = BallProduct(np.array([0, 0, 1]), np.array([1.0, 4.0]))
    q = s.project(np.array([3.0, 4.0, -1.0]))
    np.testing.assert_allclose(q, [0.6, 0.8, 0.0])
    assert s.contains(q)


@settings(max_examples=50, deadline=None)
@given(data=st.data(), n=st.integers(1, 6), total=st.floats(0.1, 5.0))
def test_capped_simplex_projection_optimal(data, n, total):
    v = np.array(data.draw(st.lists(st.floats(-3, 3), min_size=n, max_size=n)))
    caps = np.array(data.draw(st.lists(st.floats(0.1, 2.0), min_size=n, max_size=n)))
    s = CappedSimplexProduct(np.zeros(n, int), np.array([total]), caps)
    x = s.project(v)
    assert s.contains(x, rtol=1e-9)
    rng = np.random.default_rng(0)
    for _ in range(20):  # variational inequality against random feasible points
        z = s.project(rng.uniform(0, 2, n))
        assert (v - x) @ (z - x) <= 1e-8


def test_maximize_concave_interior():
    c = np.array([0.2, 0.3])
    res = maximize_concave(lambda x: -np.sum((x - c) ** 2), lambda x: -2 * (x - c),
                           CappedSimplexProduct(np.zeros(2, int), np.array([10.0])), np.zeros(2))
    np.testing.assert_allclose(res.x, c, atol=1e-6)
    assert res.converged


def test_maximize_concave_budget_face():
    c = np.array([2.0, 3.0])
    res = maximize_concave(lambda x: -np.sum((x - c) ** 2), lambda x: -2 * (x - c),
                           CappedSimplexProduct(np.zeros(2, int), np.array([1.0])), np.zeros(2))
    assert res.x.sum() == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(res.x, [0.0, 1.0], atol=1e-6)


def test_maximize_concave_start_at_optimum():
    c = np.array([0.2, 0.3])
    res = maximize_concave(lambda x: -np.sum((x - c) ** 2), lambda x: -2 * (x - c),
                           CappedSimplexProduct(np.zeros(2, int), np.array([10.0])), c)
    assert res.iterations == 0 and res.converged


def test_kernel_matches_reference():
    cfg, links = _desk_links(0)
    p = links.equal_power()
    targets = np.zeros(links.n_users)
    fset = BallProduct(links.group, links.budget)
    for kw in (dict(alpha=1.0, beta=0.0, eps=0.0),
               dict(alpha=0.0, beta=1.0, eps=0.5 * links.rates(p).sum())):
        y = link_optimal_y(links, p)
        fast = _SubProblem(links, y, scale=cfg.bandwidth_rf, targets=targets, **kw)
        slow = _SubProblem(links, y, scale=cfg.bandwidth_rf, targets=targets, **kw)
        qf = fast.solve(fset, np.sqrt(p), tol=1e-8, feas_tol=1e-7)
        qs = slow.solve_reference(fset, np.sqrt(p), tol=1e-8, feas_tol=1e-7)
        assert fast.evaluate(qf) == pytest.approx(slow.evaluate(qs), rel=1e-4, abs=1e-6)


# R_max and min-power ---------------------------------------------------------
def test_rmax_single_link():
    links = make_links([1e-10], noise=CFG.noise_rf, budget=[1.0])
    sol = solve_rmax(links, CFG, targets=np.zeros(1))
    assert sol.p[0] == pytest.approx(1.0, rel=1e-9)
    assert sol.sum_rate == pytest.approx(10e6 * math.log2(1 + 1e-10 / CFG.noise_rf), rel=1e-9)


def test_rmax_zero_gain():
    links = make_links([0.0, 0.0], noise=CFG.noise_rf, group=[0, 0], budget=[1.0])
    sol = solve_rmax(links, CFG, targets=np.zeros(2))
    assert sol.sum_rate == 0.0


def test_rmax_two_link_grid():
    rng = np.random.default_rng(5)
    for _ in range(10):
        a = 10 ** rng.uniform(-11, -9, 2)
        x = 10 ** rng.uniform(-13, -10, 2)
        links = make_links(a, B=[[0, x[0]], [x[1], 0]], group=[0, 1], budget=[1.0, 1.0],
                           noise=CFG.noise_rf)
        sol = solve_rmax(links, CFG, targets=np.zeros(2))
        g = np.linspace(0, 1, 101)
        p1, p2 = np.meshgrid(g, g)
        grid = 10e6 * (np.log2(1 + a[0] * p1 / (CFG.noise_rf + x[0] * p2))
                       + np.log2(1 + a[1] * p2 / (CFG.noise_rf + x[1] * p1)))
        assert sol.sum_rate >= 0.99 * grid.max()


def test_orthogonal_start_keeps_best_link():
    links = make_links([1e-10, 1e-11, 1e-10], B=[[0, 1e-12, 0], [1e-12, 0, 0], [0, 0, 0]],
                       group=[0, 1, 2], budget=[1.0, 1.0, 1.0], noise=CFG.noise_rf)
    p = orthogonal_start(links, np.ones(3))
    assert p[0] == 1.0 and p[2] == 1.0 and p[1] < 0.01


def test_rmax_trace_and_budgets():
    cfg, links = _desk_links(3)
    sol = solve_rmax(links, cfg)
    assert np.all(np.diff(sol.trace) >= 0)
    assert np.all(links.group_power(sol.p) <= links.budget * (1 + 1e-9))
    assert np.all(sol.p >= 0)


@pytest.mark.parametrize("frac", [0.05, 0.3, 0.7, 0.95])
def test_min_power_single_link_closed_form(frac):
    a = 2e-11
    links = make_links([a], noise=CFG.noise_rf, budget=[1.0])
    rmax = solve_rmax(links, CFG, targets=np.zeros(1))
    eps = frac * rmax.sum_rate
    sol = solve_min_power(eps, links, CFG, targets=np.zeros(1), p0=rmax.p)
    exact = (2 ** (eps / 10e6) - 1) * CFG.noise_rf / a
    assert sol.transmit_power == pytest.approx(exact, rel=1e-3)


def test_min_power_limits():
    cfg, links = _desk_links(1)
    zero = np.zeros(links.n_users)
    rmax = solve_rmax(links, cfg, targets=zero)
    tiny = solve_min_power(1e-9 * rmax.sum_rate, links, cfg, targets=zero, p0=rmax.p)
    assert tiny.transmit_power <= 1e-6 * rmax.transmit_power + 1e-12
    top = solve_min_power(rmax.sum_rate, links, cfg, targets=zero, p0=rmax.p)
    assert top.sum_rate == pytest.approx(rmax.sum_rate, rel=1e-4)
    assert np.all(np.diff(top.trace) <= 0)
    bad = solve_min_power(2 * rmax.sum_rate, links, cfg, targets=zero, p0=rmax.p)
    assert not bad.feasible


# Pareto sweep ----------------------------------------------------------------
def test_lambda_grid():
    np.testing.assert_allclose(lambda_grid(0.1), np.arange(1, 11) / 10)
    assert len(lambda_grid(0.3)) == 4 and lambda_grid(0.3)[-1] == 1.0
    assert len(lambda_grid(1.0)) == 1


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_sweep_pareto_properties(seed, tmp_path):
    cfg, links = _desk_links(seed)
    fr = sweep_pareto(links, cfg)
    assert len(fr) == 10
    lams = [e.lam for e in fr.entries]
    assert lams == sorted(lams)
    rates = np.array([e.sum_rate for e in fr.entries])
    power = np.array([e.total_power for e in fr.entries])
    assert np.all(np.diff(rates) >= 0) and np.all(np.diff(power) >= 0)
    assert fr.is_non_dominated()
    assert fr.best.ee >= fr.entries[0].ee and fr.best.ee >= fr.entries[-1].ee
    for e in fr.entries:
        assert e.sum_rate >= e.epsilon * (1 - 1e-5)
        assert np.all(links.group_power(e.p) <= links.budget * (1 + 1e-9))
    path = tmp_path / "p.csv"
    dump_pareto(fr, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "lambda,epsilon_bps,sum_rate_bps,total_power_w,ee" and len(lines) == 11


def test_sweep_empty_links():
    links = make_links([1e-10])
    empty = links.__class__(**{**links.__dict__, "a": np.zeros(0), "w": np.zeros(0),
                               "c": np.zeros(0), "n": np.zeros(0), "B": np.zeros((0, 0)),
                               "group": np.zeros(0, int), "user": np.zeros(0, int),
                               "tier": np.zeros(0, int), "ap": np.zeros(0, int),
                               "sub": np.zeros(0, int)})
    fr = sweep_pareto(empty, CFG)
    assert fr.r_max == 0.0
