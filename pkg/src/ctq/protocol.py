"""Exact state-vector simulation of the controlled teleportation protocol.

Register order is (1, 2, 3, 4, b): controller, sender, receiver, message and
the receiver's ancilla.  The controller measures qubit 1, the sender rotates
qubit 2 into its Schmidt basis and makes a Bell measurement on (2, 4), and the
receiver runs the conditional unitary on (3, b), reads the ancilla and applies
a local correction.  All 16 outcome combinations are enumerated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ValidationError
from .objective import MeasurementBasis
from .state import CanonicalState, TwoQubitPure, schmidt_decompose, to_state_vector

PROB_TOL = 1e-14
_S = 1.0 / math.sqrt(2.0)

BELL = {
    "phi+": np.array([[_S, 0], [0, _S]], dtype=complex),
    "phi-": np.array([[_S, 0], [0, -_S]], dtype=complex),
    "psi+": np.array([[0, _S], [_S, 0]], dtype=complex),
    "psi-": np.array([[0, _S], [-_S, 0]], dtype=complex),
}
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
CORRECTION = {"phi+": np.eye(2, dtype=complex), "phi-": _Z, "psi+": _X, "psi-": _Z @ _X}


@dataclass(frozen=True)
class MessageQubit:
    alpha: complex
    beta: complex

    def __post_init__(self):
        n = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(n - 1.0) > 1e-12:
            raise ValidationError(f"message norm^2 = {n!r}, expected 1")

    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)


@dataclass
class ProtocolBranch:
    charlie_outcome: str
    bell_outcome: str
    ancilla_outcome: int
    probability: float
    bob_state: np.ndarray | None
    fidelity: float | None

    @property
    def success(self) -> bool:
        return self.ancilla_outcome == 0


@dataclass
class CharlieBranch:
    outcome: str
    probability: float
    lambda0: float | None


@dataclass
class ProtocolTrace:
    branches: list[ProtocolBranch]
    total_success_probability: float
    charlie: list[CharlieBranch] = field(default_factory=list)

    def to_json(self) -> dict:
        def vec(v):
            return None if v is None else [[z.real, z.imag] for z in v]

        return {
            "total_success_probability": self.total_success_probability,
            "charlie": [
                {"outcome": c.outcome, "probability": c.probability, "lambda0": c.lambda0}
                for c in self.charlie
            ],
            "branches": [
                {
                    "charlie_outcome": br.charlie_outcome,
                    "bell_outcome": br.bell_outcome,
                    "ancilla_outcome": br.ancilla_outcome,
                    "probability": br.probability,
                    "success": br.success,
                    "fidelity": br.fidelity,
                    "bob_state": vec(br.bob_state),
                }
                for br in self.branches
            ],
        }


def u3b_matrix(lambda0: float, lambda1: float) -> np.ndarray:
    """Receiver's conditional unitary on (qubit 3, ancilla), basis |00>, |01>, |10>, |11>."""
    if lambda0 < 0 or lambda1 <= 0 or lambda0 > lambda1:
        raise DomainError(f"need 0 <= lambda0 <= lambda1, got ({lambda0!r}, {lambda1!r})")
    r = lambda0 / lambda1
    c, s = math.sqrt(r), math.sqrt(1.0 - r)
    return np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, c, s], [0, 0, -s, c]], dtype=complex
    )


def bell_project(state: np.ndarray, outcome: str, axes: tuple[int, int] = (0, 1)):
    """Project two qubits of a register onto a Bell state.

    ``state`` is a tensor of shape ``(2,) * n``.  Returns the outcome
    probability and the register of the other qubits, renormalized when the
    probability exceeds 1e-14.
    """
    t = np.moveaxis(np.asarray(state, dtype=complex), axes, (0, 1))
    rest = np.tensordot(BELL[outcome].conj(), t, axes=([0, 1], [0, 1]))
    prob = float(np.vdot(rest, rest).real)
    if prob > PROB_TOL:
        rest = rest / math.sqrt(prob)
    return prob, rest


def _apply(op: np.ndarray, t: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(op, t, axes=([1], [axis])), 0, axis)


def run_protocol(s: CanonicalState, b: MeasurementBasis, m: MessageQubit) -> ProtocolTrace:
    psi = to_state_vector(s).reshape(2, 2, 2)
    msg = m.vector()
    anc = np.array([1, 0], dtype=complex)
    branches: list[ProtocolBranch] = []
    charlie: list[CharlieBranch] = []

    for c_name, v in zip(("x", "x_perp"), b.vectors()):
        chi = np.tensordot(v.conj(), psi, axes=([0], [0]))  # qubits (2, 3), unnormalized
        p_c = float(np.vdot(chi, chi).real)
        if p_c < PROB_TOL:
            charlie.append(CharlieBranch(c_name, 0.0, None))
            branches += [
                ProtocolBranch(c_name, bell, anc_out, 0.0, None, None)
                for bell in BELL
                for anc_out in (0, 1)
            ]
            continue
        sf = schmidt_decompose(TwoQubitPure.from_vector(chi.reshape(4) / math.sqrt(p_c)))
        charlie.append(CharlieBranch(c_name, p_c, sf.lambda0))
        A, B = sf.basis_a, sf.basis_b
        lam1 = max(sf.lambda1, sf.lambda0)
        bob_op = np.kron(B, np.eye(2)) @ u3b_matrix(min(sf.lambda0, lam1), lam1) @ np.kron(
            B.conj().T, np.eye(2)
        )

        # register (2, 3, 4, b), sender rotates qubit 2 into the Schmidt basis
        reg = np.einsum("ij,k,l->ijkl", chi, msg, anc)
        reg = _apply(A.conj().T, reg, 0)
        for bell, bell_mat in BELL.items():
            rest = np.tensordot(bell_mat.conj(), reg, axes=([0, 1], [0, 2]))  # (3, b)
            rest = (bob_op @ rest.reshape(4)).reshape(2, 2)
            for anc_out in (0, 1):
                bob = rest[:, anc_out]
                prob = float(np.vdot(bob, bob).real)
                if prob < PROB_TOL:
                    branches.append(ProtocolBranch(c_name, bell, anc_out, 0.0, None, None))
                    continue
                bob = bob / math.sqrt(prob)
                if anc_out == 0:
                    bob = CORRECTION[bell] @ B.conj().T @ bob
                fid = min(abs(np.vdot(msg, bob)) ** 2, 1.0)
                branches.append(ProtocolBranch(c_name, bell, anc_out, prob, bob, fid))

    total = math.fsum(br.probability for br in branches if br.success)
    return ProtocolTrace(branches, total, charlie)
