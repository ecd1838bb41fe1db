"""Case-by-case maximal success probability from finite candidate sets.

Each case contributes boundary points, stationary roots, hyperplane
representatives and collapse points.  Every candidate is pushed through the
objective and the best one wins; known closed forms are checked against
that minimum instead of being trusted on their own.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .errors import CaseMismatch, ConsistencyError, UnsupportedGeneralCase
from .objective import MeasurementBasis, charlie_collapse, success_probability
from .state import ZERO_TOL, CanonicalState, Case, CaseLabel, classify, concurrence

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
TIE_TOL = 1e-12
CLOSED_FORM_TOL = 1e-10
COLLAPSE_TOL = 1e-10


@dataclass(frozen=True)
class CandidatePoint:
    theta: float
    phi: float
    origin: str

    def basis(self) -> MeasurementBasis:
        return MeasurementBasis(self.theta, self.phi)

    def to_json(self) -> dict:
        return {"theta": self.theta, "phi": self.phi, "origin": self.origin}


@dataclass
class OptimumReport:
    pmax: float
    best_points: list[CandidatePoint]
    case: CaseLabel
    method: str
    closed_form_pmax: float | None = None
    note: str | None = None

    def to_json(self) -> dict:
        out = {
            "method": self.method,
            "case": self.case.case.value,
            "pmax": self.pmax,
            "closed_form_pmax": self.closed_form_pmax,
            "best_points": [p.to_json() for p in self.best_points],
        }
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class CollapsePoint:
    """Basis at which branch ``branch`` (1 or 2; 0 for both) is a Bell pair."""

    theta: float
    phi: float
    branch: int


@dataclass
class CollapseReport:
    points: list[CollapsePoint] = field(default_factory=list)
    collapse_probability: float | None = None
    condition: str = ""

    def to_json(self) -> dict:
        return {
            "condition": self.condition,
            "collapse_probability": self.collapse_probability,
            "points": [
                {"theta": p.theta, "phi": p.phi, "branch": p.branch} for p in self.points
            ],
        }


def theta_from_cot(y: float) -> float:
    return math.atan2(1.0, y)


def theta_from_half_cot(t: float) -> float:
    return 2.0 * math.atan2(1.0, t)


def _pt(theta: float, phi: float, origin: str) -> CandidatePoint:
    theta = min(max(theta, 0.0), math.pi)
    phi = math.fmod(phi, TWO_PI)
    if phi < 0.0:
        phi += TWO_PI
    return CandidatePoint(theta, phi, origin)


def _roots(ys: list[tuple[str, float | None]], phi: float) -> list[CandidatePoint]:
    return [_pt(theta_from_cot(y), phi, f"stationary {name}") for name, y in ys if y is not None]


def _ratio(num: float, den: float, tol: float) -> float | None:
    return None if abs(den) <= tol else num / den


def _mirror(points: list[CandidatePoint]) -> list[CandidatePoint]:
    """Images under f(theta, phi) = f(pi - theta, phi + pi)."""
    return [_pt(math.pi - p.theta, p.phi + math.pi, p.origin + " (mirror)") for p in points]


def _collapse_points(s: CanonicalState, label: CaseLabel, tol: float) -> list[CollapsePoint]:
    return _collapse_data(s, label, tol)[0]


def candidates_for(
    s: CanonicalState, case: Case | None = None, zero_tol: float = ZERO_TOL
) -> list[CandidatePoint]:
    label = classify(s, zero_tol)
    if case is not None and Case(case) is not label.case:
        raise CaseMismatch(f"state classifies as {label.case.value}, not {Case(case).value}")
    c = label.case
    a0, a1, a2, a3, a4 = s.a
    mu = s.mu
    tol = zero_tol
    half = math.pi / 2

    if c is Case.GENERAL_FULL:
        raise UnsupportedGeneralCase("all amplitudes and sin(mu) nonzero; use the numeric optimizer")
    if c in (Case.BISEPARABLE_D24, Case.BISEPARABLE_D34, Case.DEGENERATE_PRODUCT):
        return [_pt(0.0, 0.0, "boundary theta=0")]

    pts = [_pt(0.0, 0.0, "boundary theta=0"), _pt(math.pi, 0.0, "boundary theta=pi")]
    if c is Case.GHZ_CLASS:
        g = 1.0 - 2.0 * a0 * a0
        pts += [
            _pt(half, 0.0, "stationary theta=pi/2"),
            _pt(math.acos(g), 0.0, "collapse cos(theta)=1-2a0^2"),
            _pt(math.acos(-g), 0.0, "collapse cos(theta)=-(1-2a0^2)"),
        ]
    elif c is Case.TRI_BELL:
        pts.append(_pt(half, 0.0, "stationary theta=pi/2"))
    elif c in (Case.C12, Case.C13):
        pts += [_pt(half, 0.0, "stationary theta=pi/2"), _pt(half, half, "stationary theta=pi/2")]
    elif c is Case.EXTENDED_GHZ_E:
        pts += [
            _pt(half, mu + half, "region representative"),
            _pt(half, mu + 3 * half, "region representative"),
            _pt(theta_from_cot(-a1 / a0), mu, "hyperplane a1 cos(phi-mu) sin(theta) + a0 cos(theta) = 0"),
        ]
    elif c is Case.F_A1ZERO:
        pts += _roots(
            [
                ("theta1", -a4 / (2 * a0 * a2 * a3)),
                ("theta2", a3 * (1 - 2 * a3**2 - 2 * a4**2) / (2 * a0 * a2 * a4)),
                ("theta3", a2 * (1 - 2 * a2**2 - 2 * a4**2) / (2 * a0 * a3 * a4)),
            ],
            0.0,
        )
        pts += [_pt(half, half, "stationary (pi/2, pi/2)"), _pt(half, 3 * half, "stationary (pi/2, 3pi/2)")]
    elif c is Case.G_A4ZERO:
        d = abs(a2**2 - a3**2)
        pts += _roots(
            [
                ("theta1", -a1 / a0),
                ("theta2", (a0**2 - a1**2 - d) / (2 * a0 * a1)),
                ("theta3", (a0**2 - a1**2 + d) / (2 * a0 * a1)),
            ],
            mu,
        )
        pts += [_pt(half, mu + half, "hyperplane"), _pt(half, mu - half, "hyperplane")]
    elif c in (Case.H_A2ZERO, Case.H_A3ZERO):
        pts += _roots(
            [
                ("theta1", -a1 / a0),
                ("theta2", (1 - 2 * a1**2) / (2 * a0 * a1)),
                ("theta3", (-1 + 2 * a0**2) / (2 * a0 * a1)),
            ],
            mu,
        )
        pts += [_pt(half, mu + half, "hyperplane"), _pt(half, mu - half, "hyperplane")]
    elif c is Case.I_MUZERO:
        g = a1 * a4 - a2 * a3
        d = abs(a2**2 - a3**2)
        theta1 = _ratio(2 * a1 * a2 * a3 + a4 - 2 * a1**2 * a4, 2 * a0 * g, tol)
        if abs(a2 - a3) <= tol and abs(g - 0.5) <= tol:
            theta1 = None
        den45 = 4 * a0 * (1 - a0**2) * a1
        roots = _roots(
            [
                ("theta1", theta1),
                ("theta2", (-2 * a1 * a2 * a4 + a3 * (1 - 2 * a1**2 - 2 * a3**2 - 2 * a4**2))
                 / (2 * a0 * (a1 * a3 + a2 * a4))),
                ("theta3", (-2 * a1 * a3 * a4 + a2 * (1 - 2 * a1**2 - 2 * a2**2 - 2 * a4**2))
                 / (2 * a0 * (a1 * a2 + a3 * a4))),
                ("theta4", (1 - 2 * a0**2) * (-1 + a0**2 - a1**2 + a4**2 + d) / den45),
                ("theta5", (1 - 2 * a0**2) * (-1 + a0**2 - a1**2 + a4**2 - d) / den45),
            ],
            0.0,
        )
        pts += roots
        pts += [_pt(half, half, "stationary (pi/2, pi/2)"), _pt(half, 3 * half, "stationary (pi/2, 3pi/2)")]
    elif c is Case.J_MUPI:
        if abs(a1 * a2 - a3 * a4) <= tol and abs(a1 - a4) > tol and abs(a2 - a3) <= tol:
            log.warning("a1a2 = a3a4 with a1 != a4 should force a2 != a3; got a2 = a3 for %s", s)
        num46 = -a1 + 2 * a1**3
        roots = _roots(
            [
                ("theta1", (2 * a1 * a2 * a3 - a4 + 2 * a1**2 * a4) / (2 * a0 * (a2 * a3 + a1 * a4))),
                ("theta2", _ratio(-a2 + 2 * a1**2 * a2 + 2 * a2**3 - 2 * a1 * a3 * a4 + 2 * a2 * a4**2,
                                  2 * a0 * (a1 * a2 - a3 * a4), tol)),
                ("theta3", _ratio(-a3 + 2 * a1**2 * a3 + 2 * a3**3 - 2 * a1 * a2 * a4 + 2 * a3 * a4**2,
                                  2 * a0 * (a1 * a3 - a2 * a4), tol)),
                ("theta4", (num46 + 2 * a1 * a3**2) / (2 * a0 * (a1**2 + a3**2))),
                ("theta5", _ratio(num46 + 2 * a1 * a3**2, 2 * a0 * (a1**2 - a4**2), tol)),
                ("theta6", (num46 + 2 * a1 * a2**2) / (2 * a0 * (a1**2 + a2**2))),
                ("theta7", _ratio(num46 + 2 * a1 * a2**2, 2 * a0 * (a1**2 - a4**2), tol)),
                ("theta8", -a0 * a1 / (2 * (a1**2 + a2**2))),
            ],
            0.0,
        )
        pts += roots
        pts += [_pt(half, half, "stationary (pi/2, pi/2)"), _pt(half, 3 * half, "stationary (pi/2, 3pi/2)")]

    pts += [
        _pt(p.theta, p.phi, "collapse point")
        for p in _collapse_points(s, label, tol)
        if p.branch != 0
    ]
    return _dedupe(pts + _mirror(pts))


def _dedupe(points: list[CandidatePoint]) -> list[CandidatePoint]:
    seen, out = set(), []
    for p in points:
        key = (round(p.theta, 13), round(p.phi % TWO_PI, 13))
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


def _closed_form(s: CanonicalState, c: Case) -> float | None:
    a0, _, a2, a3, a4 = s.a
    if c is Case.GHZ_CLASS:
        return 1.0 - abs(1.0 - 2.0 * a0 * a0)
    if c is Case.TRI_BELL:
        return 1.0 - min(a0**2 + abs(a2**2 - a3**2), math.sqrt(max(1.0 - 4 * a2**2 * a3**2, 0.0)))
    if c in (Case.C12, Case.C13):
        return 1.0 - math.sqrt(max(1.0 - 4 * a0**2 * a4**2, 0.0))
    if c in (Case.BISEPARABLE_D24, Case.BISEPARABLE_D34, Case.DEGENERATE_PRODUCT):
        return 0.0
    if c is Case.EXTENDED_GHZ_E:
        return 1.0 - abs(1.0 - 2.0 * a4 * a4)
    return None


_REGION_NOTES = {
    Case.GHZ_CLASS: "optimal set is the band |cos(theta)| <= |1 - 2 a0^2|, any phi",
    Case.EXTENDED_GHZ_E: "optimal set is the region "
    "|2 a0 a1 cos(phi - mu) sin(theta) - (1 - 2 a0^2 - 2 a4^2) cos(theta)| <= |1 - 2 a4^2|",
}


def pmax_analytic(s: CanonicalState, zero_tol: float = ZERO_TOL) -> OptimumReport:
    label = classify(s, zero_tol)
    cands = candidates_for(s, zero_tol=zero_tol)
    values = [success_probability(s, (p.theta, p.phi)) for p in cands]
    best = max(values)
    best_points = sorted(
        (p for p, v in zip(cands, values) if v >= best - TIE_TOL),
        key=lambda p: (p.theta, p.phi),
    )
    closed = _closed_form(s, label.case)
    if closed is not None:
        if abs(closed - best) > CLOSED_FORM_TOL:
            raise ConsistencyError(
                f"closed form {closed!r} disagrees with candidate optimum {best!r} for {s}"
            )
        if closed == 0.0:
            best = 0.0
    return OptimumReport(best, best_points, label, "analytic", closed, _REGION_NOTES.get(label.case))


def _collapse_data(s: CanonicalState, label: CaseLabel, tol: float):
    """Collapse points, closed-form branch probability and the condition text."""
    a0, a1, a2, a3, a4 = s.a
    mu = s.mu
    c = label.case
    equal23 = abs(a2 - a3) <= tol
    if c is Case.GHZ_CLASS:
        g = 1.0 - 2.0 * a0 * a0
        if abs(g) <= tol:
            return [CollapsePoint(math.pi / 2, 0.0, 0)], 1.0, "a0 = a4 = 1/sqrt(2), theta = pi/2, any phi"
        pts = [CollapsePoint(math.acos(g), 0.0, 1), CollapsePoint(math.acos(-g), 0.0, 2)]
        return pts, 2 * a0**2 * (1 - a0**2), "cos(theta) = +-(1 - 2 a0^2), any phi"
    if c is Case.TRI_BELL:
        if equal23:
            pts = [CollapsePoint(math.pi, 0.0, 1), CollapsePoint(0.0, 0.0, 2)]
            return pts, 1 - a0**2, "a2 = a3, basis {|0>, |1>}"
        return [], None, "requires a2 = a3"
    if c is Case.EXTENDED_GHZ_E:
        if abs(a4 * a4 - 0.5) <= tol:
            pts = [
                CollapsePoint(math.pi / 2, math.fmod(mu + math.pi / 2, TWO_PI), 0),
                CollapsePoint(theta_from_cot(-a1 / a0), mu, 0),
            ]
            return pts, 1.0, "a4^2 = 1/2 and a1 cos(phi - mu) sin(theta) + a0 cos(theta) = 0"
        return [], None, "certain collapse requires a4^2 = 1/2"
    if c is Case.F_A1ZERO:
        if equal23:
            t0 = theta_from_half_cot(a4 / a0)
            pts = [CollapsePoint(t0, math.pi, 1), CollapsePoint(math.pi - t0, 0.0, 2)]
            return pts, a0**2 * (1 - a0**2 + a4**2) / (a0**2 + a4**2), "a2 = a3, cot(theta0/2) = a4/a0"
        return [], None, "requires a2 = a3"
    if c is Case.G_A4ZERO:
        if equal23:
            t0 = theta_from_half_cot(a1 / a0)
            pts = [
                CollapsePoint(t0, math.fmod(mu + math.pi, TWO_PI), 1),
                CollapsePoint(math.pi - t0, mu, 2),
            ]
            return pts, a0**2 * (1 - a0**2 - a1**2) / (a0**2 + a1**2), "a2 = a3, cot(theta0/2) = a1/a0"
        return [], None, "requires a2 = a3"
    if c is Case.I_MUZERO:
        if equal23:
            t0 = theta_from_half_cot((a1 + a4) / a0)
            pts = [CollapsePoint(t0, math.pi, 1), CollapsePoint(math.pi - t0, 0.0, 2)]
            prob = a0**2 * (1 - a0**2 - a1**2 + a4**2) / (a0**2 + (a1 + a4) ** 2)
            return pts, prob, "a2 = a3, cot(theta0/2) = (a1 + a4)/a0"
        return [], None, "requires a2 = a3"
    if c is Case.J_MUPI:
        if not equal23:
            return [], None, "requires a2 = a3"
        if abs(a1 - a4) <= tol:
            pts = [CollapsePoint(math.pi, 0.0, 1), CollapsePoint(0.0, 0.0, 2)]
            return pts, 2 * a1**2 + 2 * a2**2, "a1 = a4 and a2 = a3, basis {|0>, |1>}"
        t0 = theta_from_half_cot(abs(a1 - a4) / a0)
        if a1 > a4:
            pts = [CollapsePoint(t0, 0.0, 1), CollapsePoint(math.pi - t0, math.pi, 2)]
        else:
            pts = [CollapsePoint(t0, math.pi, 1), CollapsePoint(math.pi - t0, 0.0, 2)]
        prob = a0**2 * (1 - a0**2 - a1**2 + a4**2) / (a0**2 + (a1 - a4) ** 2)
        return pts, prob, "a2 = a3, cot(theta0/2) = |a1 - a4|/a0"
    if c is Case.GENERAL_FULL:
        return [], None, "not characterized when a1 a2 a3 a4 sin(mu) != 0"
    return [], None, "never: no basis leaves a Bell pair"


def epr_collapse(s: CanonicalState, zero_tol: float = ZERO_TOL) -> CollapseReport:
    """Bases after which particles 2, 3 hold a Bell pair, each one re-verified."""
    label = classify(s, zero_tol)
    points, prob, condition = _collapse_data(s, label, zero_tol)
    for p in points:
        br = charlie_collapse(s, MeasurementBasis(p.theta, p.phi))
        branches = ((br.p1, br.phi1), (br.p2, br.phi2))
        chosen = branches if p.branch == 0 else (branches[p.branch - 1],)
        for prob_i, state_i in chosen:
            if state_i is None or abs(concurrence(state_i) - 1.0) > COLLAPSE_TOL:
                raise ConsistencyError(f"collapse point {p} does not yield a Bell pair for {s}")
        got = sum(pi for pi, _ in chosen)
        if abs(got - prob) > COLLAPSE_TOL:
            raise ConsistencyError(f"collapse probability {got!r} != {prob!r} at {p} for {s}")
    return CollapseReport(points, prob, condition)
