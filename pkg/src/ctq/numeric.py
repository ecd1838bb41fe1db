"""Brute-force optimum: dense (theta, phi) grid, then downhill-simplex polish.

The grid is filled by the compiled kernel when available.  Rows are split into
chunks that may run on a thread pool; every chunk writes a disjoint slice, so
the result does not depend on the thread count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import CandidatePoint, OptimumReport
from .errors import ValidationError
from . import kernels
from .kernels import evaluator_for
from .state import ZERO_TOL, CanonicalState, classify

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class OptimizerConfig:
    grid_theta: int = 721
    grid_phi: int = 1441
    refine_iters: int = 200
    refine_tol: float = 1e-10
    top_k_cells: int = 8
    threads: int = 1

    def __post_init__(self):
        if self.grid_theta < 2 or self.grid_phi < 2:
            raise ValidationError("grid needs at least two points per axis")
        if self.refine_iters < 1 or self.top_k_cells < 1 or self.threads < 1:
            raise ValidationError("refine_iters, top_k_cells and threads must be positive")
        if not self.refine_tol > 0:
            raise ValidationError("refine_tol must be positive")


@dataclass
class Landscape:
    """Row-major samples: ``values[i, j]`` is f at ``(thetas[i], phis[j])``."""

    thetas: np.ndarray
    phis: np.ndarray
    values: np.ndarray

    def rows(self):
        for i, t in enumerate(self.thetas):
            for j, p in enumerate(self.phis):
                yield float(t), float(p), float(self.values[i, j])


def _axes(cfg: OptimizerConfig) -> tuple[np.ndarray, np.ndarray]:
    return np.linspace(0.0, math.pi, cfg.grid_theta), np.linspace(0.0, TWO_PI, cfg.grid_phi)


def _fill(ev, thetas, phis, threads: int) -> tuple[np.ndarray, np.ndarray]:
    out_f = np.empty((thetas.size, phis.size))
    out_s = np.empty_like(out_f)
    n = thetas.size
    if threads <= 1:
        ev.fill_grid(thetas, phis, out_f, out_s, 0, n)
        return out_f, out_s
    bounds = np.linspace(0, n, threads + 1).astype(int)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        jobs = [
            pool.submit(ev.fill_grid, thetas, phis, out_f, out_s, int(lo), int(hi))
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for j in jobs:
            j.result()
    return out_f, out_s


def objective_landscape(s: CanonicalState, cfg: OptimizerConfig | None = None) -> Landscape:
    cfg = cfg or OptimizerConfig()
    thetas, phis = _axes(cfg)
    f, _ = _fill(evaluator_for(s), thetas, phis, cfg.threads)
    return Landscape(thetas, phis, f)


def _top_k(idx: np.ndarray, vals: np.ndarray, k: int) -> list[int]:
    """The ``k`` largest entries of ``vals`` (as ``idx`` labels), ties in index order.

    Same result as a stable descending sort but linear time, which matters on
    flat landscapes where most cells are plateau maxima.
    """
    if idx.size > k:
        thr = np.partition(vals, idx.size - k)[idx.size - k]
        above, level = vals > thr, vals == thr
        idx_a, vals_a = idx[above], vals[above]
        top = list(idx_a[np.argsort(-vals_a, kind="stable")])
        return top + list(idx[level][: k - len(top)])
    return list(idx[np.argsort(-vals, kind="stable")])


def _start_cells(succ: np.ndarray, k: int) -> list[tuple[int, int]]:
    """Up to ``k`` grid cells, local maxima first, ties broken by flat index."""
    core = succ[:, :-1]  # the phi = 2pi column repeats phi = 0
    npf = core.shape[1]
    flat = core.ravel()
    peaks = np.flatnonzero(kernels.local_maxima(succ))
    chosen = _top_k(peaks, flat[peaks], k)
    if len(chosen) < k:
        taken = set(chosen)
        rest = [i for i in _top_k(np.arange(flat.size), flat, k + len(chosen)) if i not in taken]
        chosen += rest[: k - len(chosen)]
    return [divmod(int(i), npf) for i in chosen]


def _fold(theta: float, phi: float) -> tuple[float, float]:
    theta = math.fmod(theta, TWO_PI)
    if theta < 0.0:
        theta += TWO_PI
    if theta > math.pi:
        theta = TWO_PI - theta
    phi = math.fmod(phi, TWO_PI)
    if phi < 0.0:
        phi += TWO_PI
    return theta, phi


def _nelder_mead(fun, x0, step, iters: int, tol: float):
    """Minimize ``fun`` over (theta, phi) with reflection at theta = 0, pi and phi wrap-around."""
    simplex = [_fold(*x0), _fold(x0[0] + step[0], x0[1]), _fold(x0[0], x0[1] + step[1])]
    values = [fun(*p) for p in simplex]
    for _ in range(iters):
        order = sorted(range(3), key=lambda i: values[i])
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        # compare in the unfolded frame of the best vertex so phi wrap does not tear the simplex
        best = simplex[0]
        pts = [best] + [
            (p[0], best[1] + math.remainder(p[1] - best[1], TWO_PI)) for p in simplex[1:]
        ]
        diam = max(math.hypot(p[0] - best[0], p[1] - best[1]) for p in pts[1:])
        if values[2] - values[0] <= tol and diam <= 1e-8:
            break
        if values[2] == values[0] and diam <= 1e-12:
            break
        cx = (pts[0][0] + pts[1][0]) / 2
        cy = (pts[0][1] + pts[1][1]) / 2
        wx, wy = pts[2]

        def at(c):
            return _fold(cx + c * (wx - cx), cy + c * (wy - cy))

        xr = at(-1.0)
        fr = fun(*xr)
        if fr < values[0]:
            xe = at(-2.0)
            fe = fun(*xe)
            simplex[2], values[2] = (xe, fe) if fe < fr else (xr, fr)
        elif fr < values[1]:
            simplex[2], values[2] = xr, fr
        else:
            xc = at(-0.5) if fr < values[2] else at(0.5)
            fc = fun(*xc)
            if fc < min(fr, values[2]):
                simplex[2], values[2] = xc, fc
            else:
                for i in (1, 2):
                    p = pts[i]
                    simplex[i] = _fold((best[0] + p[0]) / 2, (best[1] + p[1]) / 2)
                    values[i] = fun(*simplex[i])
    i = min(range(3), key=lambda j: values[j])
    return simplex[i], values[i]


def pmax_numeric(
    s: CanonicalState, cfg: OptimizerConfig | None = None, zero_tol: float = ZERO_TOL
) -> OptimumReport:
    cfg = cfg or OptimizerConfig()
    ev = evaluator_for(s)
    thetas, phis = _axes(cfg)
    _, succ = _fill(ev, thetas, phis, cfg.threads)

    cells = _start_cells(succ, cfg.top_k_cells)
    i0, j0 = cells[0]
    best_val = float(succ[i0, j0])
    best_pt = (float(thetas[i0]), float(phis[j0]))
    step = (math.pi / (cfg.grid_theta - 1), TWO_PI / (cfg.grid_phi - 1))

    def neg(theta, phi):
        return -ev.success(theta, phi)

    for i, j in cells:
        x, v = _nelder_mead(neg, (float(thetas[i]), float(phis[j])), step, cfg.refine_iters, cfg.refine_tol)
        if -v > best_val:
            best_val, best_pt = -v, x
    point = CandidatePoint(best_pt[0], best_pt[1], "numeric")
    return OptimumReport(best_val, [point], classify(s, zero_tol), "numeric", None)
