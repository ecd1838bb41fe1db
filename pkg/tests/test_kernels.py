import importlib
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctq import kernels
from ctq.objective import objective_f, success_probability
from ctq.state import Case, random_state

try:
    import ctq._kernels  # noqa: F401

    BACKENDS = ["python", "cython"]
except ImportError:
    BACKENDS = ["python"]


@pytest.mark.parametrize("backend", BACKENDS)
@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([None, *Case]), st.floats(0, math.pi), st.floats(0, 2 * math.pi))
def test_point_evaluation_matches_objective(backend, seed, case, theta, phi):
    s = random_state(seed, case)
    ev = kernels.evaluator_for(s, backend)
    assert ev.objective(theta, phi) == pytest.approx(objective_f(s, (theta, phi)), abs=1e-12)
    assert ev.success(theta, phi) == pytest.approx(success_probability(s, (theta, phi)), abs=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_grid_matches_point_evaluation(backend):
    s = random_state(11)
    ev = kernels.evaluator_for(s, backend)
    th, ph = np.linspace(0, math.pi, 13), np.linspace(0, 2 * math.pi, 17)
    f = np.empty((13, 17))
    p = np.empty_like(f)
    ev.fill_grid(th, ph, f, p, 0, 13)
    ref = np.array([[ev.objective(a, b) for b in ph] for a in th])
    assert np.max(np.abs(f - ref)) < 1e-14
    assert np.max(np.abs(f + p - 1)) < 1e-12


@pytest.mark.parametrize("backend", BACKENDS)
def test_grid_row_chunks_are_disjoint(backend):
    s = random_state(5)
    ev = kernels.evaluator_for(s, backend)
    th, ph = np.linspace(0, math.pi, 10), np.linspace(0, 2 * math.pi, 7)
    whole, pw = np.empty((10, 7)), np.empty((10, 7))
    ev.fill_grid(th, ph, whole, pw, 0, 10)
    parts, pp = np.full((10, 7), np.nan), np.full((10, 7), np.nan)
    for lo, hi in ((0, 3), (3, 4), (4, 10)):
        ev.fill_grid(th, ph, parts, pp, lo, hi)
    assert np.array_equal(whole, parts)


def test_backends_agree_bitwise_close():
    if len(BACKENDS) < 2:
        pytest.skip("compiled kernel not built")
    s = random_state(9)
    py, cy = kernels.evaluator_for(s, "python"), kernels.evaluator_for(s, "cython")
    for theta, phi in [(0.0, 0.0), (1.0, 2.0), (math.pi, 6.0), (0.3, 4.4)]:
        assert abs(py.success(theta, phi) - cy.success(theta, phi)) < 1e-15


def test_env_var_forces_pure_python(monkeypatch):
    monkeypatch.setenv("CTQ_PURE_PYTHON", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("CTQ_PURE_PYTHON")
        importlib.reload(kernels)


@pytest.mark.parametrize("backend", BACKENDS)
def test_local_maxima_wraps_phi_and_drops_last_column(backend):
    impl = kernels._kernels_py if backend == "python" else importlib.import_module("ctq._kernels")
    succ = np.array([[0.0, 1.0, 0.0, 5.0, 9.0],
                     [2.0, 0.0, 0.0, 0.0, 9.0]])
    mask = impl.local_maxima(succ)
    assert mask.shape == (2, 4)
    assert mask.tolist() == [[False, False, False, True], [False, False, False, False]]


def test_local_maxima_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("compiled kernel not built")
    cy = importlib.import_module("ctq._kernels")
    rng = np.random.default_rng(1)
    for _ in range(200):
        a = rng.integers(0, 3, (rng.integers(1, 6), rng.integers(2, 7))).astype(float)
        assert np.array_equal(cy.local_maxima(a), kernels._kernels_py.local_maxima(a))
