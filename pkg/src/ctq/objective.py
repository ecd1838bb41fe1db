"""Branch probabilities, branch states and the objective sqrt(P) + sqrt(Q).

Everything here is evaluated twice on purpose: ``P_def``/``Q_def`` work from
branch probabilities and the division-free branch amplitudes ``N1``/``N2``,
while ``P_expanded``/``Q_expanded`` are literal trigonometric polynomials.

All functions accept ``b`` as a :class:`MeasurementBasis` or a ``(theta, phi)``
pair; the pair may hold numpy arrays, in which case results broadcast.
"""
from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, ValidationError
from .state import CanonicalState, TwoQubitPure, to_state_vector

BRANCH_TOL = 1e-14
CLAMP_TOL = 1e-14

# test-only perturbation of the a1a2a3a4 cos(mu) coefficient in the expanded forms
_expansion_fault = 0.0


@contextlib.contextmanager
def inject_expansion_fault(delta: float = 1e-3):
    global _expansion_fault
    old = _expansion_fault
    _expansion_fault = delta
    try:
        yield
    finally:
        _expansion_fault = old


@dataclass(frozen=True)
class MeasurementBasis:
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValidationError(f"theta = {self.theta!r} outside [0, pi]")
        if not 0.0 <= self.phi <= 2.0 * math.pi:
            raise ValidationError(f"phi = {self.phi!r} outside [0, 2pi]")

    def vectors(self) -> tuple[np.ndarray, np.ndarray]:
        c, s = math.cos(self.theta / 2), math.sin(self.theta / 2)
        e = complex(math.cos(self.phi), math.sin(self.phi))
        return np.array([c, e * s]), np.array([s, -e * c])


@dataclass(frozen=True)
class BranchDecomposition:
    """Controller outcome probabilities and normalized branch states of qubits 2, 3.

    A branch whose probability is below ``BRANCH_TOL`` has state ``None``.
    """

    p1: float
    p2: float
    phi1: TwoQubitPure | None
    phi2: TwoQubitPure | None


def _angles(b):
    if isinstance(b, MeasurementBasis):
        return b.theta, b.phi
    theta, phi = b
    return np.asarray(theta, dtype=float), np.asarray(phi, dtype=float)


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def branch_probabilities(s: CanonicalState, b):
    theta, phi = _angles(b)
    a0, a1 = s.a0, s.a1
    cross = a0 * a1 * np.cos(s.mu - phi) * np.sin(theta)
    p1 = np.sin(theta / 2) ** 2 + a0**2 * np.cos(theta) + cross
    p2 = np.cos(theta / 2) ** 2 - a0**2 * np.cos(theta) - cross
    return _out(np.clip(p1, 0.0, 1.0)), _out(np.clip(p2, 0.0, 1.0))


def branch_amplitude_N(s: CanonicalState, b, branch: int):
    """p_i times the concurrence of branch i, with its phase; defined even when p_i = 0."""
    theta, phi = _angles(b)
    a0, a1, a2, a3, a4 = s.a
    k = (a1 * a4 * np.exp(1j * s.mu) - a2 * a3) * np.exp(-2j * phi)
    head = a0 * a4 * np.exp(-1j * phi) * np.sin(theta)
    if branch == 1:
        n = head + 2 * k * np.sin(theta / 2) ** 2
    elif branch == 2:
        n = head - 2 * k * np.cos(theta / 2) ** 2
    else:
        raise ValueError("branch must be 1 or 2")
    return complex(n) if np.ndim(n) == 0 else n


def _deficiency(p, n):
    v = np.asarray(p * p - np.abs(n) ** 2)
    if np.any(v < -CLAMP_TOL):
        raise ConsistencyError(f"negative branch deficiency {np.min(v)!r}")
    return _out(np.clip(v, 0.0, p * p))


def P_def(s: CanonicalState, b):
    p1, _ = branch_probabilities(s, b)
    return _deficiency(p1, branch_amplitude_N(s, b, 1))


def Q_def(s: CanonicalState, b):
    _, p2 = branch_probabilities(s, b)
    return _deficiency(p2, branch_amplitude_N(s, b, 2))


def _expanded(s: CanonicalState, b, sign: int):
    theta, phi = _angles(b)
    a0, a1, a2, a3, a4 = s.a
    mu = s.mu
    c2pm = np.cos(2 * (phi - mu))
    cpm = np.cos(phi - mu)
    r = a1 * a2 * a3 * a4 * math.cos(mu)
    w = 2 * a2 * a3 * a4 * np.cos(phi)
    return (
        0.25 * a0**2 * a1**2 * c2pm
        + (3 + _expansion_fault) * r
        + (3 - 4 * a0**2 + 4 * a0**4 + 2 * a0**2 * a1**2 - 12 * a2**2 * a3**2
           - 4 * a0**2 * a4**2 - 12 * a1**2 * a4**2) / 8
        + np.cos(2 * theta) / 8 * (
            1 - 4 * a0**2 + 4 * a0**4 - 2 * a0**2 * a1**2 - 2 * a0**2 * a1**2 * c2pm
            - 4 * a2**2 * a3**2 + 8 * r + 4 * a0**2 * a4**2 - 4 * a1**2 * a4**2)
        - sign * np.cos(theta) * (0.5 - a0**2 - 2 * a2**2 * a3**2 + 4 * r - 2 * a1**2 * a4**2)
        + sign * a0 * np.sin(theta) * (w + a1 * (1 - 2 * a4**2) * cpm)
        - 0.5 * a0 * np.sin(2 * theta) * (w + a1 * (1 - 2 * a0**2 - 2 * a4**2) * cpm)
    )


def P_expanded(s: CanonicalState, b):
    return _out(_expanded(s, b, +1))


def Q_expanded(s: CanonicalState, b):
    return _out(_expanded(s, b, -1))


def _branch_terms(s: CanonicalState, b, branch: int):
    """(p, sqrt P, 2|det M|) of one branch, with M its 2x2 amplitude matrix.

    With H = M M^dagger, sqrt(P) = sigma_1^2 - sigma_2^2 = sqrt((h00 - h11)^2 +
    4|h01|^2).  This keeps absolute error at rounding level where
    sqrt(p^2 - |N|^2) would only reach the square root of it.
    """
    theta, phi = _angles(b)
    a0, a1, a2, a3, a4 = s.a
    c, sn = np.cos(theta / 2), np.sin(theta / 2)
    k, g = (c, sn) if branch == 1 else (-sn, c)
    # whole branch multiplied by e^{i phi}: m00 = a0 k e^{i phi} + a1 g e^{i mu}, rest real
    m_re = a0 * k * np.cos(phi) + a1 * g * math.cos(s.mu)
    m_im = a0 * k * np.sin(phi) + a1 * g * math.sin(s.mu)
    gg = g * g
    h00 = m_re**2 + m_im**2 + a2 * a2 * gg
    h11 = (a3**2 + a4**2) * gg
    h01_re = a3 * g * m_re + a2 * a4 * gg
    h01_im = a3 * g * m_im
    root = np.hypot(h00 - h11, 2 * np.hypot(h01_re, h01_im))
    # det M = m00 a4 g - a2 a3 g^2
    n = 2 * np.hypot(m_re * a4 * g - a2 * a3 * gg, m_im * a4 * g)
    return h00 + h11, root, n


def root_deficiency(s: CanonicalState, b, branch: int):
    """sqrt(P) (branch 1) or sqrt(Q) (branch 2) without squaring near zero."""
    return _branch_terms(s, b, branch)[1]


def _branch_success(p, root, n):
    # p - sqrt(p^2 - n^2) = n^2 / (p + sqrt(...)), free of cancellation
    den = p + np.minimum(root, p)
    return np.divide(n * n, den, out=np.zeros_like(den, dtype=float), where=den > 0)


def objective_f(s: CanonicalState, b):
    return _out(np.clip(root_deficiency(s, b, 1) + root_deficiency(s, b, 2), 0.0, 1.0))


def success_probability(s: CanonicalState, b):
    """Probability that the controlled teleportation succeeds for basis ``b``.

    Per branch this is p - sqrt(P) = |N|^2 / (p + sqrt(P)), which equals the
    deficit 1 - objective_f summed over branches but is accurate to rounding
    even when a branch is nearly product, and exactly 0 when it is product.
    """
    total = _branch_success(*_branch_terms(s, b, 1)) + _branch_success(*_branch_terms(s, b, 2))
    return _out(np.clip(total, 0.0, 1.0))


def charlie_collapse(
    s: CanonicalState, b: MeasurementBasis, branch_tol: float = BRANCH_TOL
) -> BranchDecomposition:
    p1, p2 = branch_probabilities(s, b)
    theta, phi = b.theta, b.phi
    a0, a1, a2, a3, a4 = s.a
    c, sn = math.cos(theta / 2), math.sin(theta / 2)
    em = complex(math.cos(phi), -math.sin(phi))
    e1 = complex(math.cos(s.mu - phi), math.sin(s.mu - phi))
    formula = (
        np.array([a0 * c + a1 * e1 * sn, a2 * em * sn, a3 * em * sn, a4 * em * sn]),
        -np.array([-a0 * sn + a1 * e1 * c, a2 * em * c, a3 * em * c, a4 * em * c]),
    )

    psi = to_state_vector(s).reshape(2, 4)
    x, xp = b.vectors()
    projected = (x.conj() @ psi, xp.conj() @ psi)

    states = []
    for p, proj, form in zip((p1, p2), projected, formula):
        if abs(float(np.vdot(proj, proj).real) - p) > 1e-12 or np.max(np.abs(proj - form)) > 1e-12:
            raise ConsistencyError("branch state formula disagrees with direct projection")
        states.append(TwoQubitPure.from_vector(proj / math.sqrt(p)) if p >= branch_tol else None)
    return BranchDecomposition(p1, p2, states[0], states[1])
