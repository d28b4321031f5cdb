import math

import numpy as np
import pytest

from qmvsvp.analytic import mean_value
from qmvsvp.encoding import QuditLayout, all_energies
from qmvsvp.optimize import (SweepCurve, gamma_grid, golden_section, minimize_curve, ratio_report,
                             sweep_gamma, write_minima_csv)
from qmvsvp.simulator import oracle_curve

from conftest import random_gram


def test_grid_endpoints():
    assert gamma_grid(2).tolist() == [0.0, math.pi]
    with pytest.raises(ValueError):
        gamma_grid(1)


def test_sweep_first_point_is_uniform_mean():
    layout = QuditLayout(2, 2)
    G = random_gram(2, 1)
    curve = sweep_gamma(G, layout, 2, approx_orders=[1])
    assert curve.gammas.tolist() == [0.0, math.pi]
    assert curve.mu[0] == pytest.approx(all_energies(G, layout).mean(), abs=1e-12)


@pytest.mark.parametrize("k", [1, 2])
def test_sweep_matches_oracle(k):
    layout = QuditLayout(2, k)
    G = random_gram(2, 10 + k)
    curve = sweep_gamma(G, layout, 128)
    oracle = oracle_curve(G, layout, curve.gammas)
    assert np.max(np.abs(curve.mu - oracle) / np.maximum(1, np.abs(curve.mu))) < 1e-9


def test_sweep_curve_validation():
    with pytest.raises(ValueError):
        SweepCurve(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        SweepCurve(np.array([0.0, 1.0]), np.array([1.0]))


def test_golden_section_parabola():
    x, fx = golden_section(lambda g: (g - 0.3) ** 2, 0.0, 1.0, 1e-8)
    assert x == pytest.approx(0.3, abs=1e-7)


def test_minimize_boundary_tie_prefers_small_gamma():
    gs = gamma_grid(512)
    f = lambda g: (1 + math.sin(g)) / 2  # noqa: E731
    g, v = minimize_curve(gs, [f(x) for x in gs], f, refine=True)
    assert g == 0.0 and v == 0.5


def test_minimize_interior():
    gs = gamma_grid(512)
    f = lambda g: (1 - math.sin(g)) / 2  # noqa: E731
    g, v = minimize_curve(gs, [f(x) for x in gs], f, refine=True)
    assert g == pytest.approx(math.pi / 2, abs=1e-6)
    assert v == pytest.approx(0.0, abs=1e-12)
    g0, v0 = minimize_curve(gs, [f(x) for x in gs], refine=False)
    assert v <= v0


def test_minimize_constant():
    assert minimize_curve(gamma_grid(10), np.ones(10))[0] == 0.0
    with pytest.raises(ValueError):
        minimize_curve([], [])


def test_minimum_below_every_tabulated_value():
    layout = QuditLayout(2, 3)
    G = random_gram(2, 4)
    curve = sweep_gamma(G, layout, 256)
    _, v = minimize_curve(curve.gammas, curve.mu, lambda g: mean_value(G, layout, g).mu)
    assert v <= curve.mu.min()


def test_nested_grids_never_increase_minimum():
    layout = QuditLayout(2, 3)
    G = random_gram(2, 5)
    coarse = sweep_gamma(G, layout, 65)
    fine = sweep_gamma(G, layout, 129)  # contains every coarse point
    assert np.allclose(fine.gammas[::2], coarse.gammas)
    assert fine.mu.min() <= coarse.mu.min()


@pytest.mark.parametrize("refine", [True, False])
def test_ratio_report_invariants(refine):
    for seed in range(6):
        layout = QuditLayout(2, 4)
        G = random_gram(2, seed)
        rep = ratio_report(G, layout, 256, [1, 2, 3, 5], refine=refine)
        assert rep.baseline_ratio >= 1 - 1e-12
        for A, r in rep.orders.items():
            assert r.ratio >= 1 - 1e-12
            assert r.mu_at_gamma_a == pytest.approx(mean_value(G, layout, r.gamma_a).mu, rel=1e-12)
        assert rep.mu_at_opt == pytest.approx(mean_value(G, layout, rep.gamma_opt).mu, rel=1e-12)


def test_refined_optimum_not_worse_than_grid():
    layout = QuditLayout(2, 3)
    G = random_gram(2, 2)
    grid = ratio_report(G, layout, 256, [1, 2], refine=False)
    refined = ratio_report(G, layout, 256, [1, 2], refine=True)
    assert refined.mu_at_opt <= grid.mu_at_opt


def test_minima_csv(tmp_path):
    layout = QuditLayout(2, 2)
    rep = ratio_report(random_gram(2, 1), layout, 64, [1, 2], lattice_id="x")
    path = write_minima_csv([rep], tmp_path / "m.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "lattice_id,gamma_opt,mu_opt,A,gamma_A,mu_at_gamma_A,ratio,baseline_ratio"
    assert len(lines) == 3
