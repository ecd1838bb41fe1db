"""Acceptance suite: one PASS/FAIL line per criterion is printed at the end of the run."""
import io
import math
from contextlib import redirect_stdout

import numpy as np
import pytest

from ctq.analytic import epr_collapse, pmax_analytic
from ctq.cli import main
from ctq.numeric import pmax_numeric
from ctq.objective import (
    MeasurementBasis,
    P_def,
    P_expanded,
    Q_def,
    Q_expanded,
    branch_probabilities,
    charlie_collapse,
    objective_f,
)
from ctq.protocol import run_protocol
from ctq.state import Case, concurrence, random_state, validate
from ctq.verify import MESSAGES, collapse_state, mixed_state, random_basis

R2 = 1 / math.sqrt(2)
R3 = 1 / math.sqrt(3)
TWO_PI = 2 * math.pi
crit = pytest.mark.criterion


def rng(tag: int) -> np.random.Generator:
    return np.random.default_rng([20240601, tag])


def protocol_checks(s, b):
    """Success per message and the worst success-branch fidelity."""
    totals, worst_fid = [], 1.0
    for m in MESSAGES:
        tr = run_protocol(s, b, m)
        totals.append(tr.total_success_probability)
        for br in tr.branches:
            if br.success and br.fidelity is not None:
                worst_fid = min(worst_fid, br.fidelity)
    return totals, worst_fid


@crit(1, "GHZ perfection")
def test_c1_ghz_perfection():
    s = validate([R2, 0, 0, 0, R2], 0.0)
    assert abs(pmax_analytic(s).pmax - 1) <= 1e-9
    assert abs(pmax_numeric(s).pmax - 1) <= 1e-9
    totals, fid = protocol_checks(s, MeasurementBasis(math.pi / 2, 0.0))
    assert all(abs(t - 1) <= 1e-10 for t in totals)
    assert fid >= 1 - 1e-10


@crit(2, "Case-A closed form")
def test_c2_case_a_closed_form():
    worst = 0.0
    for a0sq in np.linspace(0.01, 0.99, 50):
        s = validate([math.sqrt(a0sq), 0, 0, 0, math.sqrt(1 - a0sq)], 0.0)
        expected = 1 - abs(1 - 2 * a0sq)
        for rep in (pmax_analytic(s), pmax_numeric(s)):
            worst = max(worst, abs(rep.pmax - expected))
    assert worst <= 1e-9


@crit(3, "W-state value")
def test_c3_w_state():
    s = validate([R3, 0, R3, R3, 0], 0.0)
    assert abs(pmax_analytic(s).pmax - 2 / 3) <= 1e-6
    assert abs(pmax_numeric(s).pmax - 2 / 3) <= 1e-6


@crit(4, "Case-C closed form")
def test_c4_case_c_closed_form():
    g = rng(4)
    worst = 0.0
    for i in range(50):
        s = random_state(g, Case.C12 if i % 2 == 0 else Case.C13)
        expected = 1 - math.sqrt(1 - 4 * s.a0**2 * s.a4**2)
        for rep in (pmax_analytic(s), pmax_numeric(s)):
            worst = max(worst, abs(rep.pmax - expected))
    assert worst <= 1e-6


@crit(5, "Extended-GHZ perfection")
def test_c5_extended_ghz():
    g = rng(5)
    for _ in range(20):
        w, mu = g.uniform(0.01, 0.49), g.uniform(0, math.pi)
        a0, a1 = math.sqrt(w), math.sqrt(0.5 - w)
        s = validate([a0, a1, 0, 0, R2], mu)
        assert abs(pmax_analytic(s).pmax - 1) <= 1e-8
        assert abs(pmax_numeric(s).pmax - 1) <= 1e-8
        # a1 cos(phi - mu) sin(theta) + a0 cos(theta) = 0 has one theta per phi
        for phi in g.uniform(0, TWO_PI, 3):
            theta = math.atan2(a0, -a1 * math.cos(phi - mu))
            assert abs(a1 * math.cos(phi - mu) * math.sin(theta) + a0 * math.cos(theta)) <= 1e-14
            totals, fid = protocol_checks(s, MeasurementBasis(theta, phi))
            assert min(totals) >= 1 - 1e-8
            assert fid >= 1 - 1e-10


@crit(6, "Biseparable zero")
@pytest.mark.parametrize("case", [Case.BISEPARABLE_D24, Case.BISEPARABLE_D34, Case.DEGENERATE_PRODUCT])
def test_c6_biseparable_zero(case):
    g = rng(6)
    for _ in range(30):
        s = random_state(g, case)
        assert pmax_analytic(s).pmax == 0.0
        assert pmax_numeric(s).pmax == 0.0


@crit(7, "Form equivalence")
def test_c7_form_equivalence():
    g = rng(7)
    worst_p = worst_q = 0.0
    for _ in range(1000):
        s, b = mixed_state(g), random_basis(g)
        worst_p = max(worst_p, abs(P_expanded(s, b) - P_def(s, b)))
        worst_q = max(worst_q, abs(Q_expanded(s, b) - Q_def(s, b)))
    assert worst_p <= 1e-12 and worst_q <= 1e-12


@crit(8, "Symmetry suite")
def test_c8_symmetry():
    g = rng(8)
    worst = 0.0
    for _ in range(1000):
        s, b = mixed_state(g), random_basis(g)
        th, ph = b.theta, b.phi
        shifted = ph + math.pi if ph <= math.pi else ph - math.pi
        mirror = (math.pi - th, shifted)
        worst = max(
            worst,
            abs(Q_def(s, b) - P_def(s, mirror)),
            abs(P_def(s, b) - Q_def(s, mirror)),
            abs(objective_f(s, (0.0, ph)) - objective_f(s, (math.pi, ph))),
            abs(objective_f(s, (th, 0.0)) - objective_f(s, (th, TWO_PI))),
        )
    assert worst <= 1e-12


AGREEMENT_CLASSES = [
    Case.GHZ_CLASS, Case.TRI_BELL, Case.C12, Case.C13, Case.EXTENDED_GHZ_E, Case.F_A1ZERO,
    Case.G_A4ZERO, Case.H_A2ZERO, Case.H_A3ZERO, Case.I_MUZERO, Case.J_MUPI,
]


@crit(9, "Analytic-numeric agreement")
@pytest.mark.parametrize("case", AGREEMENT_CLASSES, ids=lambda c: c.value)
def test_c9_agreement(case):
    g = rng(900 + AGREEMENT_CLASSES.index(case))
    worst = 0.0
    for _ in range(100):
        s = random_state(g, case)
        worst = max(worst, abs(pmax_analytic(s).pmax - pmax_numeric(s).pmax))
    assert worst <= 1e-5


@crit(10, "Operational equivalence")
def test_c10_operational_equivalence():
    g = rng(10)
    worst_formula = worst_spread = 0.0
    for _ in range(200):
        s, b = mixed_state(g), random_basis(g)
        target = 1 - math.sqrt(P_def(s, b)) - math.sqrt(Q_def(s, b))
        totals, _ = protocol_checks(s, b)
        worst_formula = max(worst_formula, max(abs(t - target) for t in totals))
        worst_spread = max(worst_spread, max(totals) - min(totals))
    assert worst_formula <= 1e-10
    assert worst_spread <= 1e-10


# Reference closed forms for the Bell-branch probability at each collapse basis.
REFERENCE_COLLAPSE = {
    "A": lambda a0, a1, a2, a3, a4: 2 * a0**2 * (1 - a0**2),
    "B": lambda a0, a1, a2, a3, a4: 1 - a0**2,
    "F": lambda a0, a1, a2, a3, a4: a0**2 * (1 - a0**2 + a4**2) / (a0**2 + a4**2),
    "G": lambda a0, a1, a2, a3, a4: a0**2 * (1 - a0**2 - a1**2) / (a0**2 + a1**2),
    "I": lambda a0, a1, a2, a3, a4: a0**2 * (1 - a0**2 + 3 * a1**2 + 4 * a1 * a4 + a4**2) / (a0**2 + (a1 + a4) ** 2),
    "J": lambda a0, a1, a2, a3, a4: a0**2 * (1 - a0**2 + 3 * a1**2 - 4 * a1 * a4 + a4**2) / (a0**2 + (a1 - a4) ** 2),
    "J_a1_eq_a4": lambda a0, a1, a2, a3, a4: 2 * a1**2 + 2 * a2**2,
}
COLLAPSE_PLANS = {
    "A": (Case.GHZ_CLASS, False),
    "B": (Case.TRI_BELL, False),
    "F": (Case.F_A1ZERO, False),
    "G": (Case.G_A4ZERO, False),
    "I": (Case.I_MUZERO, False),
    "J": (Case.J_MUPI, False),
    "J_a1_eq_a4": (Case.J_MUPI, True),
}


def _collapse_samples(label):
    case, eq14 = COLLAPSE_PLANS[label]
    g = rng(1100 + list(COLLAPSE_PLANS).index(label))
    return [collapse_state(g, case, eq14) for _ in range(20)]


@crit(11, "Collapse verification")
@pytest.mark.parametrize("label", list(COLLAPSE_PLANS))
def test_c11_collapse_concurrence(label):
    for s in _collapse_samples(label):
        rep = epr_collapse(s)
        assert rep.points
        for p in rep.points:
            br = charlie_collapse(s, MeasurementBasis(p.theta, p.phi))
            chosen = (br.phi1, br.phi2) if p.branch == 0 else ((br.phi1, br.phi2)[p.branch - 1],)
            for state in chosen:
                assert abs(concurrence(state) - 1) <= 1e-10


@crit(11, "Collapse verification")
@pytest.mark.parametrize("label", list(COLLAPSE_PLANS))
def test_c11_collapse_probability_matches_reference(label):
    ref = REFERENCE_COLLAPSE[label]
    worst = 0.0
    for s in _collapse_samples(label):
        rep = epr_collapse(s)
        expected = ref(*s.a)
        for p in rep.points:
            probs = branch_probabilities(s, MeasurementBasis(p.theta, p.phi))
            worst = max(worst, abs(probs[p.branch - 1] - expected))
    print(f"collapse probability {label}: worst |measured - reference| = {worst:.3e}")
    assert worst <= 1e-10


@crit(11, "Collapse verification")
def test_c11_ghz_perfect_collapse_is_certain():
    s = validate([R2, 0, 0, 0, R2], 0.0)
    rep = epr_collapse(s)
    assert rep.collapse_probability == 1.0
    br = charlie_collapse(s, MeasurementBasis(rep.points[0].theta, rep.points[0].phi))
    assert abs(concurrence(br.phi1) - 1) <= 1e-10 and abs(concurrence(br.phi2) - 1) <= 1e-10


@crit(11, "Collapse verification")
@pytest.mark.parametrize("case", [Case.C12, Case.C13, Case.H_A2ZERO, Case.H_A3ZERO], ids=lambda c: c.value)
def test_c11_never_collapsing_cases(case):
    g = rng(1200 + [Case.C12, Case.C13, Case.H_A2ZERO, Case.H_A3ZERO].index(case))
    th, ph = np.meshgrid(np.linspace(0, math.pi, 181), np.linspace(0, TWO_PI, 361), indexing="ij")
    for _ in range(10):
        s = random_state(g, case)
        assert float(np.min(np.minimum(P_def(s, (th, ph)), Q_def(s, (th, ph))))) > 0
        assert epr_collapse(s).points == []


@crit(12, "Determinism")
def test_c12_verify_is_byte_identical():
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        with redirect_stdout(buf):
            code = main(["verify", "--seed", "42"])
        outs.append((code, buf.getvalue()))
    assert outs[0] == outs[1]
    assert outs[0][0] == 0
