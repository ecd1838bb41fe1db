import math

import numpy as np
import pytest

from ctq.errors import ValidationError
from ctq.numeric import OptimizerConfig, objective_landscape, pmax_numeric
from ctq.objective import objective_f, success_probability
from ctq.state import Case, random_state, validate

R2 = 1 / math.sqrt(2)
R3 = 1 / math.sqrt(3)
GHZ = validate([R2, 0, 0, 0, R2], 0.0)
W = validate([R3, 0, R3, R3, 0], 0.0)
SMALL = OptimizerConfig(grid_theta=91, grid_phi=181)


def test_ghz_and_w():
    assert pmax_numeric(GHZ).pmax == pytest.approx(1.0, abs=1e-9)
    rep = pmax_numeric(W)
    assert rep.pmax == pytest.approx(2 / 3, abs=1e-6)
    assert rep.method == "numeric" and rep.case.case is Case.TRI_BELL
    assert rep.best_points[0].origin == "numeric"


def test_c_class_example():
    s = validate([math.sqrt(0.3), 0, 0, math.sqrt(0.4), math.sqrt(0.3)], 0.0)
    assert pmax_numeric(s).pmax == pytest.approx(0.2, abs=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_beats_random_bases(seed):
    s = random_state(seed)
    rep = pmax_numeric(s)
    rng = np.random.default_rng(seed)
    th, ph = rng.uniform(0, math.pi, 1000), rng.uniform(0, 2 * math.pi, 1000)
    assert rep.pmax >= float(np.max(success_probability(s, (th, ph)))) - 1e-9


@pytest.mark.parametrize("seed", range(4))
def test_result_is_at_least_the_grid_best(seed):
    s = random_state(seed, Case.J_MUPI)
    land = objective_landscape(s, SMALL)
    assert pmax_numeric(s, SMALL).pmax >= 1 - float(land.values.min()) - 1e-15


@pytest.mark.parametrize("seed", range(4))
def test_finer_grid_never_loses(seed):
    s = random_state(100 + seed)
    coarse = OptimizerConfig(grid_theta=181, grid_phi=361)
    fine = OptimizerConfig(grid_theta=361, grid_phi=721)
    assert pmax_numeric(s, fine).pmax >= pmax_numeric(s, coarse).pmax - 1e-8


@pytest.mark.parametrize("seed", range(6))
def test_general_optimum_is_stationary(seed):
    s = random_state(200 + seed, Case.GENERAL_FULL)
    rep = pmax_numeric(s)
    assert 0 <= rep.pmax <= 1
    p = rep.best_points[0]
    h = 1e-6
    on_boundary = p.theta < h or p.theta > math.pi - h
    if not on_boundary:
        gt = (objective_f(s, (p.theta + h, p.phi)) - objective_f(s, (p.theta - h, p.phi))) / (2 * h)
        ph_lo, ph_hi = (p.phi - h) % (2 * math.pi), (p.phi + h) % (2 * math.pi)
        gp = (objective_f(s, (p.theta, ph_hi)) - objective_f(s, (p.theta, ph_lo))) / (2 * h)
        assert math.hypot(gt, gp) <= 1e-5


def test_thread_count_does_not_change_results():
    s = random_state(17)
    one = pmax_numeric(s, OptimizerConfig(threads=1))
    four = pmax_numeric(s, OptimizerConfig(threads=4))
    assert one.to_json() == four.to_json()
    a = objective_landscape(s, OptimizerConfig(grid_theta=50, grid_phi=70, threads=1))
    b = objective_landscape(s, OptimizerConfig(grid_theta=50, grid_phi=70, threads=3))
    assert np.array_equal(a.values, b.values)


def test_repeat_runs_are_identical():
    s = random_state(23, Case.I_MUZERO)
    assert pmax_numeric(s).to_json() == pmax_numeric(s).to_json()


def test_landscape_ghz_three_by_three():
    land = objective_landscape(GHZ, OptimizerConfig(grid_theta=3, grid_phi=3))
    assert land.values.shape == (3, 3)
    # poles leave a product pair, the equator a Bell pair
    assert np.allclose(land.values[0], 1.0, atol=1e-15)
    assert np.allclose(land.values[2], 1.0, atol=1e-15)
    assert np.allclose(land.values[1], 0.0, atol=1e-15)
    rows = list(land.rows())
    assert len(rows) == 9 and rows[0] == (0.0, 0.0, land.values[0, 0])


@pytest.mark.parametrize("seed", range(5))
def test_landscape_range_and_periodicity(seed):
    land = objective_landscape(random_state(seed), OptimizerConfig(grid_theta=37, grid_phi=73))
    assert np.all((land.values >= 0) & (land.values <= 1))
    assert np.max(np.abs(land.values[:, 0] - land.values[:, -1])) <= 1e-12
    assert np.max(np.abs(land.values[0] - land.values[-1])) <= 1e-12


@pytest.mark.parametrize("case", [Case.BISEPARABLE_D24, Case.DEGENERATE_PRODUCT])
def test_biseparable_numeric_is_zero(case):
    assert 0.0 <= pmax_numeric(random_state(3, case), SMALL).pmax <= 1e-15


@pytest.mark.parametrize(
    "kwargs",
    [{"grid_theta": 1}, {"grid_phi": 1}, {"refine_iters": 0}, {"refine_tol": 0.0},
     {"top_k_cells": 0}, {"threads": 0}],
)
def test_config_validation(kwargs):
    with pytest.raises(ValidationError):
        OptimizerConfig(**kwargs)
