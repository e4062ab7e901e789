"""Layered ansatz circuits and the budgeted cost oracle.

A circuit has ``L`` layers; each layer is one single-qubit gate per wire
followed by a brick of CZ gates, ``(0,1), (2,3), ...`` then ``(1,2), (3,4), ...``.
Slot ``d`` is gate ``d % n`` of layer ``d // n``, so slots are visited
top-to-bottom within a layer and layer by layer.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BudgetExhausted, ConfigurationError
from .gates import GateParam
from .statevector import Observable, Projector, cz_signs, estimate_with_shots


def brick_pairs(n: int) -> tuple[tuple[int, int], ...]:
    even = [(q, q + 1) for q in range(0, n - 1, 2)]
    odd = [(q, q + 1) for q in range(1, n - 1, 2)]
    return tuple(even + odd)


class AnsatzCircuit:
    """Mutable slot grid with cached prefix states.

    ``prefix_state(d)`` is the state after slots ``0 .. d-1`` (and the
    entanglers of every finished layer); ``prefix_state(L * n)`` is the
    circuit output. Replacing slot ``d`` invalidates prefixes beyond ``d``.
    """

    def __init__(self, n_qubits: int, layers: int, slots: Sequence[GateParam]):
        if n_qubits < 1 or layers < 1:
            raise ConfigurationError("a circuit needs at least one qubit and one layer")
        if len(slots) != n_qubits * layers:
            raise ConfigurationError(
                f"expected {n_qubits * layers} slots for {layers}x{n_qubits}, got {len(slots)}"
            )
        self.n_qubits = n_qubits
        self.layers = layers
        self.entangler = brick_pairs(n_qubits)
        self._signs = cz_signs(n_qubits, self.entangler)
        self._slots = list(slots)
        self._mats = [p.matrix() for p in self._slots]
        zero = np.zeros(1 << n_qubits, dtype=complex)
        zero[0] = 1.0
        self._prefix = [zero]

    @property
    def n_slots(self) -> int:
        return len(self._slots)

    @property
    def slots(self) -> tuple[GateParam, ...]:
        return tuple(self._slots)

    def __getitem__(self, d: int) -> GateParam:
        return self._slots[d]

    def __setitem__(self, d: int, p: GateParam) -> None:
        self._slots[d] = p
        self._mats[d] = p.matrix()
        del self._prefix[d + 1 :]

    def qubit_of(self, d: int) -> int:
        return d % self.n_qubits

    def matrix(self, d: int) -> np.ndarray:
        return self._mats[d]

    def copy(self) -> "AnsatzCircuit":
        return AnsatzCircuit(self.n_qubits, self.layers, self._slots)

    def _advance(self, state: np.ndarray, d: int, gate: np.ndarray) -> np.ndarray:
        """Apply slot ``d``'s gate (batched over leading axes) and any layer-closing CZs."""
        n, q = self.n_qubits, d % self.n_qubits
        lead = state.shape[:-1]
        psi = state.reshape(*lead, 1 << q, 2, 1 << (n - q - 1))
        out = np.matmul(gate, psi).reshape(*lead, -1)
        if q == n - 1:
            out = out * self._signs
        return out

    def prefix_state(self, d: int) -> np.ndarray:
        while len(self._prefix) <= d:
            k = len(self._prefix) - 1
            self._prefix.append(self._advance(self._prefix[k], k, self._mats[k]))
        return self._prefix[d]

    def state(self) -> np.ndarray:
        return self.prefix_state(self.n_slots).copy()

    def probe_states(self, d: int, gates: Sequence[np.ndarray]) -> np.ndarray:
        """Output states with slot ``d`` replaced by each of ``gates``; shape (k, 2**n)."""
        start = self.prefix_state(d)
        batch = np.stack([start] * len(gates))
        q = self.qubit_of(d)
        n = self.n_qubits
        psi = batch.reshape(len(gates), 1 << q, 2, 1 << (n - q - 1))
        out = np.matmul(np.asarray(gates)[:, None, :, :], psi).reshape(len(gates), -1)
        if q == n - 1:
            out = out * self._signs
        for k in range(d + 1, self.n_slots):
            out = self._advance(out, k, self._mats[k])
        return out


@dataclass
class EvalBudget:
    """Count of circuit evaluations against an optional limit."""

    limit: int | None = None
    used: int = 0
    exhausted: bool = False

    @property
    def remaining(self) -> float:
        return float("inf") if self.limit is None else self.limit - self.used

    def consume(self, k: int = 1) -> None:
        if self.limit is not None and self.used + k > self.limit:
            self.exhausted = True
            raise BudgetExhausted(
                f"need {k} evaluations, {self.limit - self.used} of {self.limit} remain"
            )
        self.used += k


@dataclass
class CostOracle:
    """Evaluates the cost of a circuit, exactly or with per-term shot noise.

    Every call to :meth:`evaluate` or :meth:`probe` is charged to ``budget``
    (one unit per circuit evaluated) before anything is simulated.
    :meth:`exact` is an instrumentation read and is never charged.
    """

    observable: Observable
    shots: int | None = None
    rng: np.random.Generator | None = None
    budget: EvalBudget = field(default_factory=EvalBudget)

    def __post_init__(self):
        if self.shots is not None:
            if self.shots < 1:
                raise ConfigurationError("shots must be >= 1")
            if self.rng is None:
                raise ConfigurationError("shot-noise oracle needs an rng")

    def _measure(self, state: np.ndarray) -> float:
        if self.shots is None:
            return self.observable.expectation(state)
        return estimate_with_shots(state, self.observable, self.shots, self.rng)

    def _check(self, circuit: AnsatzCircuit) -> None:
        if circuit.n_qubits != self.observable.n_qubits:
            raise ConfigurationError(
                f"circuit has {circuit.n_qubits} qubits, observable {self.observable.n_qubits}"
            )

    def evaluate(self, circuit: AnsatzCircuit) -> float:
        self._check(circuit)
        self.budget.consume(1)
        return self._measure(circuit.prefix_state(circuit.n_slots))

    def probe(self, circuit: AnsatzCircuit, d: int, gates: Sequence[np.ndarray]) -> np.ndarray:
        """Costs of the circuit with slot ``d`` set to each gate in turn."""
        self._check(circuit)
        self.budget.consume(len(gates))
        states = circuit.probe_states(d, gates)
        if self.shots is None:
            return self.observable.expectations(states)
        return np.array([self._measure(s) for s in states])

    def exact(self, circuit: AnsatzCircuit) -> float:
        self._check(circuit)
        return self.observable.expectation(circuit.prefix_state(circuit.n_slots))

    def metric(self, circuit: AnsatzCircuit) -> float:
        """Reported figure of merit: energy, or trace distance for projector costs."""
        value = self.exact(circuit)
        if isinstance(self.observable, Projector):
            return float(np.sqrt(min(1.0, max(0.0, 1.0 + value))))
        return value
