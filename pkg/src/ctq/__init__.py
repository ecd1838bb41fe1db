"""Optimal controlled teleportation through canonical three-qubit channels."""
from .analytic import (
    CandidatePoint,
    CollapsePoint,
    CollapseReport,
    OptimumReport,
    candidates_for,
    epr_collapse,
    pmax_analytic,
)
from .errors import (
    A0Zero,
    CaseMismatch,
    ConsistencyError,
    CTQError,
    DomainError,
    MuOutOfRange,
    NegativeAmplitude,
    NotNormalized,
    UnsupportedGeneralCase,
    ValidationError,
)
from .kernels import BACKEND
from .numeric import Landscape, OptimizerConfig, objective_landscape, pmax_numeric
from .objective import (
    BranchDecomposition,
    MeasurementBasis,
    P_def,
    P_expanded,
    Q_def,
    Q_expanded,
    branch_amplitude_N,
    branch_probabilities,
    charlie_collapse,
    objective_f,
    success_probability,
)
from .protocol import MessageQubit, ProtocolBranch, ProtocolTrace, bell_project, run_protocol, u3b_matrix
from .state import (
    CanonicalState,
    Case,
    CaseLabel,
    SchmidtForm,
    TwoQubitPure,
    classify,
    concurrence,
    random_state,
    schmidt_coefficients_from_concurrence,
    schmidt_decompose,
    state_from_json,
    to_state_vector,
    validate,
)

__version__ = "0.1.0"
