"""Canonical three-qubit channels, case taxonomy, and two-qubit pure-state tools.

A channel is written in the five-term canonical form

    a0|000> + a1 e^{i mu}|100> + a2|101> + a3|110> + a4|111>

with qubit 1 held by the controller, qubit 2 by the sender and qubit 3 by the
receiver.  Basis index of |q1 q2 q3> is ``4*q1 + 2*q2 + q3``.
"""
from __future__ import annotations

import enum
import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    A0Zero,
    DomainError,
    MuOutOfRange,
    NegativeAmplitude,
    NotNormalized,
    ValidationError,
)

NORM_TOL = 1e-9
ZERO_TOL = 1e-12


@dataclass(frozen=True)
class CanonicalState:
    a: tuple[float, float, float, float, float]
    mu: float

    @property
    def a0(self) -> float:
        return self.a[0]

    @property
    def a1(self) -> float:
        return self.a[1]

    @property
    def a2(self) -> float:
        return self.a[2]

    @property
    def a3(self) -> float:
        return self.a[3]

    @property
    def a4(self) -> float:
        return self.a[4]

    def to_json(self) -> dict:
        return {"a": list(self.a), "mu": self.mu}


class Case(str, enum.Enum):
    GHZ_CLASS = "GhzClass"
    TRI_BELL = "TriBell"
    C12 = "C12"
    C13 = "C13"
    BISEPARABLE_D24 = "BiseparableD24"
    BISEPARABLE_D34 = "BiseparableD34"
    EXTENDED_GHZ_E = "ExtendedGhzE"
    F_A1ZERO = "F_a1zero"
    G_A4ZERO = "G_a4zero"
    H_A2ZERO = "H_a2zero"
    H_A3ZERO = "H_a3zero"
    I_MUZERO = "I_muZero"
    J_MUPI = "J_muPi"
    GENERAL_FULL = "GeneralFull"
    DEGENERATE_PRODUCT = "DegenerateProduct"


@dataclass(frozen=True)
class CaseLabel:
    """Case plus the raw routing data: bit ``i-1`` of ``zero_mask`` is set when a_i is zero."""

    case: Case
    zero_mask: int
    sin_mu_zero: bool

    @property
    def zero_amplitudes(self) -> list[str]:
        return [f"a{i}" for i in range(1, 5) if self.zero_mask >> (i - 1) & 1]

    @property
    def mu_class(self) -> str:
        return "zero_or_pi" if self.sin_mu_zero else "generic"


# zero pattern over (a1, a2, a3, a4) -> case; anything absent is DegenerateProduct
_PATTERNS = {
    (True, True, True, False): Case.GHZ_CLASS,
    (True, False, False, True): Case.TRI_BELL,
    (True, True, False, False): Case.C12,
    (True, False, True, False): Case.C13,
    (False, True, False, True): Case.BISEPARABLE_D24,
    (False, False, True, True): Case.BISEPARABLE_D34,
    (False, True, True, False): Case.EXTENDED_GHZ_E,
    (True, False, False, False): Case.F_A1ZERO,
    (False, False, False, True): Case.G_A4ZERO,
    (False, True, False, False): Case.H_A2ZERO,
    (False, False, True, False): Case.H_A3ZERO,
}

# amplitudes forced to zero when sampling a given case
_FORCED_ZEROS = {
    Case.GHZ_CLASS: (1, 2, 3),
    Case.TRI_BELL: (1, 4),
    Case.C12: (1, 2),
    Case.C13: (1, 3),
    Case.BISEPARABLE_D24: (2, 4),
    Case.BISEPARABLE_D34: (3, 4),
    Case.EXTENDED_GHZ_E: (2, 3),
    Case.F_A1ZERO: (1,),
    Case.G_A4ZERO: (4,),
    Case.H_A2ZERO: (2,),
    Case.H_A3ZERO: (3,),
    Case.I_MUZERO: (),
    Case.J_MUPI: (),
    Case.GENERAL_FULL: (),
}
_DEGENERATE_PATTERNS = ((1, 2, 3, 4), (2, 3, 4), (1, 3, 4), (1, 2, 4))


def validate(
    a: Sequence[float],
    mu: float,
    *,
    normalize: bool = False,
    norm_tol: float = NORM_TOL,
    zero_tol: float = ZERO_TOL,
) -> CanonicalState:
    """Check raw amplitudes and phase and build a :class:`CanonicalState`.

    With ``normalize`` the amplitudes are rescaled by ``1/sqrt(sum a_i^2)``
    before the norm check; ``mu`` is never folded into range.
    """
    vals = [float(x) for x in a]
    if len(vals) != 5:
        raise NotNormalized(f"expected five amplitudes, got {len(vals)}")
    mu = float(mu)
    if not all(math.isfinite(x) for x in vals) or not math.isfinite(mu):
        raise NotNormalized("amplitudes and mu must be finite")
    for i, x in enumerate(vals):
        if x < 0:
            raise NegativeAmplitude(f"a{i} = {x!r} is negative")
    if not 0.0 <= mu <= math.pi:
        raise MuOutOfRange(f"mu = {mu!r} outside [0, pi]")
    norm2 = math.fsum(x * x for x in vals)
    if normalize:
        if norm2 == 0.0:
            raise NotNormalized("all amplitudes are zero")
        scale = 1.0 / math.sqrt(norm2)
        vals = [x * scale for x in vals]
        norm2 = math.fsum(x * x for x in vals)
    if abs(norm2 - 1.0) > norm_tol:
        raise NotNormalized(f"sum of squared amplitudes is {norm2!r}, not 1")
    if vals[0] <= zero_tol:
        raise A0Zero(f"a0 = {vals[0]!r} must be nonzero")
    return CanonicalState(tuple(vals), mu)


def state_from_json(obj: dict, **kwargs) -> CanonicalState:
    """Parse ``{"a": [a0..a4], "mu": radians}``; keyword arguments go to :func:`validate`."""
    try:
        a = obj["a"]
        mu = obj.get("mu", 0.0)
    except (TypeError, KeyError, AttributeError) as exc:
        raise NotNormalized(f"malformed state record: {obj!r}") from exc
    if not isinstance(a, (list, tuple)):
        raise NotNormalized("state record field 'a' must be a list of five numbers")
    try:
        return validate(a, mu, **kwargs)
    except ValidationError:
        raise
    except (TypeError, ValueError) as exc:
        raise NotNormalized(f"malformed state record: {obj!r}") from exc


def to_state_vector(s: CanonicalState) -> np.ndarray:
    psi = np.zeros(8, dtype=complex)
    psi[0b000] = s.a0
    psi[0b100] = s.a1 * complex(math.cos(s.mu), math.sin(s.mu))
    psi[0b101] = s.a2
    psi[0b110] = s.a3
    psi[0b111] = s.a4
    return psi


def classify(s: CanonicalState, zero_tol: float = ZERO_TOL) -> CaseLabel:
    zeros = tuple(x <= zero_tol for x in s.a[1:])
    mask = sum(1 << i for i, z in enumerate(zeros) if z)
    sin_mu_zero = s.mu <= zero_tol or math.pi - s.mu <= zero_tol
    if not any(zeros):
        if s.mu <= zero_tol:
            case = Case.I_MUZERO
        elif math.pi - s.mu <= zero_tol:
            case = Case.J_MUPI
        else:
            case = Case.GENERAL_FULL
    else:
        case = _PATTERNS.get(zeros, Case.DEGENERATE_PRODUCT)
    return CaseLabel(case, mask, sin_mu_zero)


def random_state(seed=None, constraint: Case | None = None) -> CanonicalState:
    """Sample a canonical state, optionally restricted to one case.

    Squared amplitudes are uniform on the simplex (normalized squares of
    standard normals) and mu is uniform on [0, pi].  ``seed`` may be an int or
    a ``numpy.random.Generator``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    sq = rng.standard_normal(5) ** 2
    mu = float(rng.uniform(0.0, math.pi))
    if constraint is not None:
        constraint = Case(constraint)
        if constraint is Case.DEGENERATE_PRODUCT:
            zeros = _DEGENERATE_PATTERNS[int(rng.integers(len(_DEGENERATE_PATTERNS)))]
        else:
            zeros = _FORCED_ZEROS[constraint]
        for i in zeros:
            sq[i] = 0.0
        if constraint is Case.I_MUZERO:
            mu = 0.0
        elif constraint is Case.J_MUPI:
            mu = math.pi
    a = np.sqrt(sq / sq.sum())
    return CanonicalState(tuple(float(x) for x in a), mu)


@dataclass(frozen=True)
class TwoQubitPure:
    c00: complex
    c01: complex
    c10: complex
    c11: complex

    @classmethod
    def from_vector(cls, v) -> "TwoQubitPure":
        v = np.asarray(v, dtype=complex).reshape(4)
        return cls(*(complex(x) for x in v))

    def vector(self) -> np.ndarray:
        return np.array([self.c00, self.c01, self.c10, self.c11], dtype=complex)

    def matrix(self) -> np.ndarray:
        return self.vector().reshape(2, 2)

    def norm2(self) -> float:
        return abs(self.c00) ** 2 + abs(self.c01) ** 2 + abs(self.c10) ** 2 + abs(self.c11) ** 2


@dataclass(frozen=True)
class SchmidtForm:
    """``state = sum_k sqrt(lambda_k) basis_a[:, k] (x) basis_b[:, k]``, k = 0 the smaller weight."""

    lambda0: float
    lambda1: float
    basis_a: np.ndarray
    basis_b: np.ndarray

    def reconstruct(self) -> np.ndarray:
        lam = (self.lambda0, self.lambda1)
        return sum(
            math.sqrt(lam[k]) * np.kron(self.basis_a[:, k], self.basis_b[:, k]) for k in range(2)
        )


def concurrence(t: TwoQubitPure) -> float:
    return 2.0 * abs(t.c00 * t.c11 - t.c01 * t.c10)


def _unit(z: complex, r: float) -> complex:
    """``z / |z|`` from the argument of ``z``, which stays exact for subnormal ``z``."""
    if r == 0.0:
        return 1.0 + 0.0j
    return cmath.exp(1j * math.atan2(z.imag, z.real))


def schmidt_decompose(t: TwoQubitPure) -> SchmidtForm:
    """Closed-form SVD of the 2x2 coefficient matrix.

    The dominant left singular vector comes from a rotation angle of the
    Hermitian matrix M M^dagger; the partner vectors are fixed by
    orthogonality, and every phase is pushed into the local bases so both
    singular values are real and nonnegative.
    """
    m = t.matrix()
    h = m @ m.conj().T
    hd = (h[0, 0].real, h[1, 1].real)
    b = h[0, 1]
    babs = abs(b)
    phase = _unit(b, babs)
    ang = 0.5 * math.atan2(2.0 * babs, hd[0] - hd[1])
    c, s = math.cos(ang), math.sin(ang)
    u_big = np.array([c, phase.conjugate() * s], dtype=complex)
    u_small = np.array([-phase * s, c], dtype=complex)

    w = m.conj().T @ u_big
    sigma_big = float(np.linalg.norm(w))
    v_big = w / sigma_big
    v_small = np.array([-v_big[1].conjugate(), v_big[0].conjugate()])
    z = u_small.conj() @ m @ v_small
    sigma_small = abs(z)
    if sigma_small > 0.0:
        v_small = v_small * _unit(z, sigma_small).conjugate()

    basis_a = np.column_stack([u_small, u_big])
    # c_ij = sum_k sigma_k u_k[i] conj(v_k[j]), so the receiver's vectors are conj(v_k)
    basis_b = np.column_stack([v_small.conj(), v_big.conj()])
    return SchmidtForm(sigma_small**2, sigma_big**2, basis_a, basis_b)


def schmidt_coefficients_from_concurrence(c: float) -> tuple[float, float]:
    if c < -1e-12 or c > 1.0 + 1e-12:
        raise DomainError(f"concurrence {c!r} outside [0, 1]")
    c = min(max(c, 0.0), 1.0)
    root = math.sqrt(max(1.0 - c * c, 0.0))
    # (1 - root)/2 rewritten to avoid cancellation for small c
    lam0 = c * c / (2.0 * (1.0 + root))
    return lam0, 1.0 - lam0
