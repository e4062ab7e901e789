"""Gradient-free sequential optimizers for variational quantum circuits.

Rotosolve, Rotosolve-Haar, Fraxis, FQS and their gate- and iteration-specific
hybrids, running on a small statevector simulator with optional shot noise.
"""
from .circuit import AnsatzCircuit, CostOracle, EvalBudget
from .errors import (
    BudgetExhausted,
    CapabilityError,
    ConfigurationError,
    InvariantError,
    ParseError,
    RepresentationError,
    ShapeError,
)
from .gates import Axis, FixedAngle, HaarAngle, Quat, decompose_unitary, gate_matrix
from .hamiltonians import exact_ground_energy, h2_hamiltonian, heisenberg_1d, heisenberg_2d, projector_cost
from .statevector import PauliSum, PauliTerm, Projector, expectation
from .trial import Algorithm, Problem, TrialConfig, TrialTrace, run_trial

__version__ = "0.1.0"
