"""Sequential single-gate optimizers and the sweeps that schedule them.

Every step works on one slot of an :class:`~seqopt.circuit.AnsatzCircuit`,
charges its evaluations to the oracle's budget up front and then replaces the
slot in place:

==============  =============  ===========
step            slot variant   evaluations
==============  =============  ===========
rotosolve       angle          3
fraxis          axis           6
fqs             quaternion     10
param. shift    angle          2
==============  =============  ===========

Sweeps visit the slots in order and stop quietly when the budget cannot pay
for the next gate; ``oracle.budget.exhausted`` tells the caller.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterator, Optional

import numpy as np

from .circuit import AnsatzCircuit, CostOracle
from .errors import BudgetExhausted, ConfigurationError, RepresentationError
from .gates import (
    Axis,
    FixedAngle,
    HaarAngle,
    Quat,
    quaternion_to_matrix,
    rotation,
    to_haar_angle,
    to_quat,
    wrap_angle,
)
from .linalg import lowest_eigenpair_sym

GateHook = Optional[Callable[[AnsatzCircuit, int], None]]

EVALS = {"rotosolve": 3, "rotosolve_haar": 3, "fraxis": 6, "fqs": 10, "adam": 2}


# ---------------------------------------------------------------------------
# Rotosolve


@dataclass(frozen=True)
class SinusoidFit:
    """``A sin(theta + B) + C``."""

    A: float
    B: float
    C: float

    def __call__(self, theta):
        return self.A * np.sin(np.asarray(theta) + self.B) + self.C

    @property
    def argmin(self) -> float:
        return wrap_angle(-np.pi / 2 - self.B)

    @property
    def minimum(self) -> float:
        return self.C - self.A


def fit_sinusoid(m_phi: float, m_plus: float, m_minus: float, phi: float = 0.0) -> SinusoidFit:
    """Fit from costs at ``phi``, ``phi + pi/2`` and ``phi - pi/2``."""
    y = 2 * m_phi - m_plus - m_minus
    x = m_plus - m_minus
    return SinusoidFit(A=0.5 * np.hypot(y, x), B=float(np.arctan2(y, x)) - phi, C=(m_plus + m_minus) / 2)


def _angle_slot(circuit: AnsatzCircuit, d: int):
    p = circuit[d]
    if not isinstance(p, (FixedAngle, HaarAngle)):
        raise RepresentationError(f"slot {d} holds {type(p).__name__}, expected an angle gate")
    return p


def rotosolve_step(circuit: AnsatzCircuit, d: int, oracle: CostOracle, phi: float = 0.0) -> AnsatzCircuit:
    p = _angle_slot(circuit, d)
    g = p.generator_matrix()
    angles = (phi, phi + np.pi / 2, phi - np.pi / 2)
    m = oracle.probe(circuit, d, [rotation(t, g) for t in angles])
    fit = fit_sinusoid(*m, phi=phi)
    circuit[d] = p.with_theta(fit.argmin)
    return circuit


def parameter_shift_gradient(circuit: AnsatzCircuit, d: int, oracle: CostOracle) -> float:
    p = _angle_slot(circuit, d)
    g = p.generator_matrix()
    plus, minus = oracle.probe(circuit, d, [rotation(p.theta + s, g) for s in (np.pi / 2, -np.pi / 2)])
    return (plus - minus) / 2


# ---------------------------------------------------------------------------
# Quadratic-form optimizers (Fraxis, FQS)


def _probe_quadratic_form(circuit, d, oracle, basis, to_matrix) -> np.ndarray:
    """Symmetric matrix ``R`` with ``cost(v) = v^T R v`` on unit vectors ``v``.

    Diagonals come from the basis vectors, off-diagonals from the normalized
    midpoints ``(e_j + e_k)/sqrt(2)``: ``R_jk = cost - (R_jj + R_kk)/2``.
    """
    k = basis.shape[0]
    pairs = list(combinations(range(k), 2))
    points = [basis[i] for i in range(k)] + [(basis[i] + basis[j]) / np.sqrt(2) for i, j in pairs]
    costs = oracle.probe(circuit, d, [to_matrix(v) for v in points])
    r = np.diag(costs[:k])
    for (i, j), c in zip(pairs, costs[k:]):
        r[i, j] = r[j, i] = c - (costs[i] + costs[j]) / 2
    return r


def _axis_matrix(n: np.ndarray) -> np.ndarray:
    return Axis(n).matrix()


def fraxis_matrix(circuit: AnsatzCircuit, d: int, oracle: CostOracle) -> np.ndarray:
    if not isinstance(circuit[d], Axis):
        raise RepresentationError(f"slot {d} holds {type(circuit[d]).__name__}, expected Axis")
    return _probe_quadratic_form(circuit, d, oracle, np.eye(3), _axis_matrix)


def fraxis_step(circuit: AnsatzCircuit, d: int, oracle: CostOracle) -> AnsatzCircuit:
    r = fraxis_matrix(circuit, d, oracle)
    _, n = lowest_eigenpair_sym(r)
    circuit[d] = Axis(n)
    return circuit


def fqs_build_s_matrix(circuit: AnsatzCircuit, d: int, oracle: CostOracle) -> np.ndarray:
    if not isinstance(circuit[d], Quat):
        raise RepresentationError(f"slot {d} holds {type(circuit[d]).__name__}, expected Quat")
    return _probe_quadratic_form(circuit, d, oracle, np.eye(4), quaternion_to_matrix)


def fqs_step(circuit: AnsatzCircuit, d: int, oracle: CostOracle) -> AnsatzCircuit:
    s = fqs_build_s_matrix(circuit, d, oracle)
    _, q = lowest_eigenpair_sym(s)
    circuit[d] = Quat(q)
    return circuit


# ---------------------------------------------------------------------------
# Sweeps


def _sweep(circuit, oracle, step, on_gate: GateHook) -> AnsatzCircuit:
    for d in range(circuit.n_slots):
        try:
            step(circuit, d, oracle)
        except BudgetExhausted:
            break
        if on_gate is not None:
            on_gate(circuit, d)
    return circuit


def rotosolve_sweep(circuit, oracle, on_gate: GateHook = None) -> AnsatzCircuit:
    """One pass of Rotosolve (or Rotosolve-Haar, depending on the slot type)."""
    return _sweep(circuit, oracle, rotosolve_step, on_gate)


def fraxis_sweep(circuit, oracle, on_gate: GateHook = None) -> AnsatzCircuit:
    return _sweep(circuit, oracle, fraxis_step, on_gate)


def fqs_sweep(circuit, oracle, on_gate: GateHook = None) -> AnsatzCircuit:
    return _sweep(circuit, oracle, fqs_step, on_gate)


def _rotohaar_converted(circuit, d, oracle):
    circuit[d] = to_haar_angle(circuit[d])
    rotosolve_step(circuit, d, oracle)


def _fqs_converted(circuit, d, oracle):
    circuit[d] = to_quat(circuit[d])
    fqs_step(circuit, d, oracle)


_HYBRID_STEPS = {"rotosolve_haar": _rotohaar_converted, "fqs": _fqs_converted}


def _guarded(step, cost):
    # conversion must not happen unless the step can be paid for
    def run(circuit, d, oracle):
        if oracle.budget.remaining < cost:
            oracle.budget.consume(cost)
        step(circuit, d, oracle)

    return run


def gate_choices(p: float, rng: np.random.Generator) -> Iterator[str]:
    """Endless per-gate schedule of the gate-specific hybrid."""
    if not 0.0 <= p <= 1.0:
        raise ConfigurationError(f"p must lie in [0, 1], got {p}")
    while True:
        yield "rotosolve_haar" if rng.random() < p else "fqs"


def iteration_choice(N: int, i: int, which: str) -> str:
    """Algorithm used for every gate of sweep ``i`` (1-based) of an iteration hybrid."""
    if N < 1 or i < 1:
        raise ConfigurationError(f"need N >= 1 and i >= 1, got N={N}, i={i}")
    if which not in ("fqs_every_N", "rotohaar_every_N"):
        raise ConfigurationError(f"unknown iteration hybrid {which!r}")
    every, otherwise = ("fqs", "rotosolve_haar") if which == "fqs_every_N" else ("rotosolve_haar", "fqs")
    return every if i % N == 0 else otherwise


def gate_specific_sweep(
    circuit: AnsatzCircuit,
    oracle: CostOracle,
    p: float,
    rng: np.random.Generator,
    on_gate: GateHook = None,
) -> AnsatzCircuit:
    """Per gate: Rotosolve-Haar with probability ``p``, FQS otherwise."""
    choices = gate_choices(p, rng)
    for d in range(circuit.n_slots):
        algo = next(choices)
        try:
            _guarded(_HYBRID_STEPS[algo], EVALS[algo])(circuit, d, oracle)
        except BudgetExhausted:
            break
        if on_gate is not None:
            on_gate(circuit, d)
    return circuit


def iteration_specific_sweep(
    circuit: AnsatzCircuit,
    oracle: CostOracle,
    N: int,
    i: int,
    which: str = "fqs_every_N",
    on_gate: GateHook = None,
) -> AnsatzCircuit:
    """Sweep ``i`` uses one algorithm when ``i % N == 0`` and the other otherwise."""
    algo = iteration_choice(N, i, which)
    return _sweep(circuit, oracle, _guarded(_HYBRID_STEPS[algo], EVALS[algo]), on_gate)


# ---------------------------------------------------------------------------
# Adam baseline


@dataclass
class AdamState:
    lr: float = 0.1
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: np.ndarray = field(default=None)
    v: np.ndarray = field(default=None)

    def update(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        if self.m is None:
            self.m = np.zeros_like(grad)
            self.v = np.zeros_like(grad)
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad**2
        m_hat = self.m / (1 - self.beta1**self.t)
        v_hat = self.v / (1 - self.beta2**self.t)
        return params - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def adam_parameter_shift_sweep(
    circuit: AnsatzCircuit,
    oracle: CostOracle,
    state: AdamState,
    on_gate: GateHook = None,
) -> AnsatzCircuit:
    """Full parameter-shift gradient (2 evaluations per slot), then one Adam update.

    If the budget runs out while the gradient is being collected, no update
    is applied.
    """
    for d in range(circuit.n_slots):
        _angle_slot(circuit, d)
    grad = np.empty(circuit.n_slots)
    for d in range(circuit.n_slots):
        try:
            grad[d] = parameter_shift_gradient(circuit, d, oracle)
        except BudgetExhausted:
            return circuit
    theta = np.array([circuit[d].theta for d in range(circuit.n_slots)])
    new = state.update(theta, grad)
    for d in range(circuit.n_slots):
        circuit[d] = circuit[d].with_theta(wrap_angle(new[d]))
    if on_gate is not None:
        on_gate(circuit, circuit.n_slots - 1)
    return circuit
