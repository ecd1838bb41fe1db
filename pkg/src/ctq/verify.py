"""Invariant battery behind ``ctq verify``.

Each suite draws from its own child generator of one seeded
``SeedSequence``, so adding samples to one suite never shifts another.  The
summary holds the worst error per suite and, on failure, the first offending
input in a form that can be replayed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import epr_collapse, pmax_analytic
from .errors import CTQError
from .numeric import OptimizerConfig, pmax_numeric
from .objective import (
    MeasurementBasis,
    P_def,
    P_expanded,
    Q_def,
    Q_expanded,
    branch_probabilities,
    objective_f,
    success_probability,
)
from .protocol import MessageQubit, run_protocol
from .state import (
    CanonicalState,
    Case,
    TwoQubitPure,
    concurrence,
    random_state,
    schmidt_decompose,
)

TWO_PI = 2.0 * math.pi

ANALYTIC_CLASSES = (
    Case.GHZ_CLASS, Case.TRI_BELL, Case.C12, Case.C13, Case.BISEPARABLE_D24,
    Case.BISEPARABLE_D34, Case.EXTENDED_GHZ_E, Case.F_A1ZERO, Case.G_A4ZERO,
    Case.H_A2ZERO, Case.H_A3ZERO, Case.I_MUZERO, Case.J_MUPI, Case.DEGENERATE_PRODUCT,
)

MESSAGES = (
    MessageQubit(1.0, 0.0),
    MessageQubit(0.0, 1.0),
    MessageQubit(1 / math.sqrt(2), 1 / math.sqrt(2)),
    MessageQubit(1 / math.sqrt(2), 1j / math.sqrt(2)),
    MessageQubit(math.cos(0.3), complex(math.cos(1.1), math.sin(1.1)) * math.sin(0.3)),
)


@dataclass(frozen=True)
class VerifyCounts:
    samples: int = 1000
    states_per_class: int = 3
    protocol_pairs: int = 50
    collapse_states: int = 20


class _Suite:
    def __init__(self, name: str, tol: float):
        self.name, self.tol = name, tol
        self.checked = 0
        self.max_error = 0.0
        self.failure = None

    def record(self, err: float, context: dict):
        self.checked += 1
        if not err <= self.max_error:
            self.max_error = err if not math.isnan(err) else math.inf
        if self.failure is None and not err <= self.tol:
            self.failure = {**context, "error": err if math.isfinite(err) else None}

    def summary(self) -> dict:
        return {
            "passed": self.failure is None,
            "checked": self.checked,
            "tolerance": self.tol,
            "max_error": self.max_error if math.isfinite(self.max_error) else None,
            "failure": self.failure,
        }


def random_basis(rng: np.random.Generator) -> MeasurementBasis:
    return MeasurementBasis(float(rng.uniform(0, math.pi)), float(rng.uniform(0, TWO_PI)))


def mixed_state(rng: np.random.Generator) -> CanonicalState:
    """Half generic states, half drawn from a random analytic class."""
    if rng.uniform() < 0.5:
        return random_state(rng)
    return random_state(rng, ANALYTIC_CLASSES[int(rng.integers(len(ANALYTIC_CLASSES)))])


def collapse_state(rng: np.random.Generator, case: Case, a1_eq_a4: bool = False) -> CanonicalState:
    """A state of ``case`` meeting its collapse condition (a2 = a3, and a1 = a4 if asked)."""
    s = random_state(rng, case)
    a = list(s.a)
    if case is Case.EXTENDED_GHZ_E:
        w = float(rng.uniform(0.05, 0.45))
        return CanonicalState((math.sqrt(w), math.sqrt(0.5 - w), 0.0, 0.0, math.sqrt(0.5)), s.mu)
    if case is not Case.GHZ_CLASS:
        a[2] = a[3] = math.sqrt((a[2] ** 2 + a[3] ** 2) / 2)
    if a1_eq_a4:
        a[1] = a[4] = math.sqrt((a[1] ** 2 + a[4] ** 2) / 2)
    return CanonicalState(tuple(a), s.mu)


def _ctx(s: CanonicalState, b: MeasurementBasis | None = None) -> dict:
    out = {"state": s.to_json()}
    if b is not None:
        out["basis"] = {"theta": b.theta, "phi": b.phi}
    return out


def _form_suites(rng, n):
    sp, sq = _Suite("P_expanded", 1e-12), _Suite("Q_expanded", 1e-12)
    for _ in range(n):
        s, b = mixed_state(rng), random_basis(rng)
        sp.record(abs(P_expanded(s, b) - P_def(s, b)), _ctx(s, b))
        sq.record(abs(Q_expanded(s, b) - Q_def(s, b)), _ctx(s, b))
    return [sp, sq]


def _symmetry_suite(rng, n):
    suite = _Suite("symmetry", 1e-12)
    for _ in range(n):
        s, b = mixed_state(rng), random_basis(rng)
        shift = b.phi + math.pi if b.phi <= math.pi else b.phi - math.pi
        mirror = (math.pi - b.theta, shift)
        err = abs(Q_def(s, b) - P_def(s, mirror))
        err = max(err, abs(P_def(s, b) - Q_def(s, mirror)))
        err = max(err, abs(objective_f(s, (0.0, b.phi)) - objective_f(s, (math.pi, b.phi))))
        err = max(err, abs(objective_f(s, (b.theta, 0.0)) - objective_f(s, (b.theta, TWO_PI))))
        suite.record(err, _ctx(s, b))
    return suite


def _bounds_suite(rng, n):
    suite = _Suite("bounds", 0.0)
    for _ in range(n):
        s, b = mixed_state(rng), random_basis(rng)
        p1, p2 = branch_probabilities(s, b)
        P, Q, f = P_def(s, b), Q_def(s, b), objective_f(s, b)
        ok = 0 <= P <= p1 * p1 and 0 <= Q <= p2 * p2 and 0 <= f <= 1
        ok = ok and 0 <= success_probability(s, b) <= 1
        suite.record(0.0 if ok else 1.0, _ctx(s, b))
    return suite


def _schmidt_suite(rng, n):
    suite = _Suite("schmidt", 1e-12)
    for _ in range(n):
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        t = TwoQubitPure.from_vector(v / np.linalg.norm(v))
        sf = schmidt_decompose(t)
        c = concurrence(t)
        err = max(
            float(np.max(np.abs(sf.reconstruct() - t.vector()))),
            abs(2 * math.sqrt(sf.lambda0 * sf.lambda1) - c),
        )
        suite.record(err, {"two_qubit": [[z.real, z.imag] for z in t.vector()]})
    return suite


def _agreement_suite(rng, n, cfg):
    suite = _Suite("analytic_numeric", 1e-5)
    for case in ANALYTIC_CLASSES:
        for _ in range(n):
            s = random_state(rng, case)
            try:
                err = abs(pmax_analytic(s).pmax - pmax_numeric(s, cfg).pmax)
            except CTQError:
                err = math.inf
            suite.record(err, _ctx(s))
    return suite


def _protocol_suite(rng, n):
    suite = _Suite("protocol", 1e-10)
    for _ in range(n):
        s, b = mixed_state(rng), random_basis(rng)
        target = success_probability(s, b)
        totals, err = [], 0.0
        for m in MESSAGES:
            tr = run_protocol(s, b, m)
            totals.append(tr.total_success_probability)
            err = max(err, abs(tr.total_success_probability - target))
            err = max(err, abs(math.fsum(br.probability for br in tr.branches) - 1.0))
            fids = [br.fidelity for br in tr.branches if br.success and br.fidelity is not None]
            err = max([err] + [1.0 - f for f in fids])
        err = max(err, max(totals) - min(totals))
        suite.record(err, _ctx(s, b))
    return suite


def _collapse_suite(rng, n):
    suite = _Suite("collapse", 0.0)
    plans = [(Case.GHZ_CLASS, False), (Case.TRI_BELL, False), (Case.EXTENDED_GHZ_E, False),
             (Case.F_A1ZERO, False), (Case.G_A4ZERO, False), (Case.I_MUZERO, False),
             (Case.J_MUPI, False), (Case.J_MUPI, True)]
    for case, eq14 in plans:
        for _ in range(n):
            s = collapse_state(rng, case, eq14)
            try:
                rep = epr_collapse(s)
                err = 0.0 if rep.points else 1.0
            except CTQError:
                err = 1.0
            suite.record(err, _ctx(s))
    return suite


def run_verify(
    seed: int = 42,
    counts: VerifyCounts | None = None,
    cfg: OptimizerConfig | None = None,
) -> dict:
    counts = counts or VerifyCounts()
    cfg = cfg or OptimizerConfig()
    rngs = [np.random.default_rng(c) for c in np.random.SeedSequence(seed).spawn(7)]
    suites = _form_suites(rngs[0], counts.samples)
    suites += [
        _symmetry_suite(rngs[1], counts.samples),
        _bounds_suite(rngs[2], counts.samples),
        _schmidt_suite(rngs[3], counts.samples),
        _agreement_suite(rngs[4], counts.states_per_class, cfg),
        _protocol_suite(rngs[5], counts.protocol_pairs),
        _collapse_suite(rngs[6], counts.collapse_states),
    ]
    failed = [s.name for s in suites if s.failure is not None]
    return {
        "seed": seed,
        "passed": not failed,
        "failed_suites": failed,
        "suites": {s.name: s.summary() for s in suites},
    }
