"""One seeded optimization trial: initialize, sweep until the budget is spent, trace."""
from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import hamiltonians
from .circuit import AnsatzCircuit, CostOracle, EvalBudget
from .errors import ConfigurationError
from .gates import Axis, FixedAngle, HaarAngle, Quat, haar_random_u2, matrix_to_quaternion, random_axis
from .optimizers import (
    AdamState,
    adam_parameter_shift_sweep,
    fqs_sweep,
    fraxis_sweep,
    gate_specific_sweep,
    iteration_specific_sweep,
    rotosolve_sweep,
)
from .statevector import Observable, random_state

ALGORITHMS = (
    "adam",
    "rotosolve",
    "rotosolve_haar",
    "fraxis",
    "fqs",
    "gate_hybrid",
    "iter_hybrid_fqs",
    "iter_hybrid_rotohaar",
)
PROBLEMS = ("heisenberg1d", "heisenberg2d", "h2", "random_state")

TRACE_HEADER = ("trial", "algorithm", "hyperparam", "evals_used", "cost")


@dataclass(frozen=True)
class Problem:
    """Which cost function to minimize.

    ``random_state`` draws a fresh target per trial, so :meth:`observable`
    takes the trial's generator.
    """

    kind: str
    n: int | None = None
    rows: int | None = None
    cols: int | None = None
    J: float = 1.0
    h: float = 1.0

    def __post_init__(self):
        if self.kind not in PROBLEMS:
            raise ConfigurationError(f"problem.kind must be one of {PROBLEMS}, got {self.kind!r}")
        if self.kind in ("heisenberg1d", "random_state") and (self.n is None or self.n < 1):
            raise ConfigurationError(f"problem.n is required for {self.kind}")
        if self.kind == "heisenberg1d" and self.n < 3:
            raise ConfigurationError("problem.n must be >= 3 for heisenberg1d")
        if self.kind == "heisenberg2d" and (self.rows is None or self.cols is None):
            raise ConfigurationError("problem.rows and problem.cols are required for heisenberg2d")

    @property
    def n_qubits(self) -> int:
        if self.kind == "h2":
            return 4
        if self.kind == "heisenberg2d":
            return self.rows * self.cols
        return self.n

    def observable(self, rng: np.random.Generator | None = None) -> Observable:
        if self.kind == "heisenberg1d":
            return hamiltonians.heisenberg_1d(self.n, self.J, self.h)
        if self.kind == "heisenberg2d":
            return hamiltonians.heisenberg_2d(self.rows, self.cols, self.J, self.h)
        if self.kind == "h2":
            return hamiltonians.h2_hamiltonian()
        if rng is None:
            raise ConfigurationError("random_state problems need an rng for the target")
        return hamiltonians.projector_cost(random_state(self.n, rng))

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass(frozen=True)
class Algorithm:
    name: str
    p: float | None = None
    N: int | None = None

    def __post_init__(self):
        if self.name not in ALGORITHMS:
            raise ConfigurationError(f"algorithm must be one of {ALGORITHMS}, got {self.name!r}")
        if self.name == "gate_hybrid":
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ConfigurationError(f"gate_hybrid needs p in [0, 1], got {self.p!r}")
        if self.name.startswith("iter_hybrid"):
            if self.N is None or int(self.N) != self.N or self.N < 1:
                raise ConfigurationError(f"{self.name} needs an integer N >= 1, got {self.N!r}")

    @property
    def hyperparam(self) -> str:
        if self.p is not None:
            return f"p={self.p:g}"
        if self.N is not None:
            return f"N={int(self.N)}"
        return ""

    @property
    def label(self) -> str:
        return f"{self.name}[{self.hyperparam}]" if self.hyperparam else self.name

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass(frozen=True)
class TrialConfig:
    problem: Problem
    layers: int
    algorithm: Algorithm
    shots: int | None = None
    iterations: int = 50  # Rotosolve-equivalent sweeps; fixes the evaluation budget
    lr: float = 0.1

    def __post_init__(self):
        if self.layers < 1:
            raise ConfigurationError("layers must be >= 1")
        if self.iterations < 1:
            raise ConfigurationError("iterations must be >= 1")
        if self.shots is not None and self.shots < 1:
            raise ConfigurationError("shots must be >= 1 or None for exact")

    @property
    def budget(self) -> int:
        return 3 * self.layers * self.problem.n_qubits * self.iterations


@dataclass
class TrialTrace:
    """Cost after every gate optimization, against evaluations spent so far.

    The first record is the initial circuit at zero evaluations. For
    random-state problems the recorded value is the trace distance to the
    target rather than the projector cost.
    """

    algorithm: str
    hyperparam: str
    seed: int
    budget: int
    records: list[tuple[int, float]] = field(default_factory=list)
    truncated: bool = False

    @property
    def evals(self) -> np.ndarray:
        return np.array([e for e, _ in self.records], dtype=int)

    @property
    def costs(self) -> np.ndarray:
        return np.array([c for _, c in self.records])

    @property
    def final_cost(self) -> float:
        return self.records[-1][1]

    def csv_rows(self, trial_id: int) -> list[tuple]:
        return [(trial_id, self.algorithm, self.hyperparam, e, repr(float(c))) for e, c in self.records]

    def to_csv(self, trial_id: int = 0) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        w.writerows(self.csv_rows(trial_id))
        return buf.getvalue()


def _uniform_angle(rng: np.random.Generator) -> float:
    # uniform on (-pi, pi]
    return float(np.pi - rng.uniform(0.0, 2 * np.pi))


def init_circuit(n_qubits: int, layers: int, algorithm: str, rng: np.random.Generator) -> AnsatzCircuit:
    """Random starting circuit in the representation ``algorithm`` optimizes."""
    slots = []
    for _ in range(n_qubits * layers):
        if algorithm in ("adam", "rotosolve"):
            slots.append(FixedAngle(_uniform_angle(rng), "XYZ"[rng.integers(3)]))
        elif algorithm == "fraxis":
            slots.append(Axis(random_axis(rng)))
        elif algorithm == "fqs":
            slots.append(Quat(matrix_to_quaternion(haar_random_u2(rng))))
        elif algorithm in ALGORITHMS:
            slots.append(HaarAngle(_uniform_angle(rng), haar_random_u2(rng)))
        else:
            raise ConfigurationError(f"unknown algorithm {algorithm!r}")
    return AnsatzCircuit(n_qubits, layers, slots)


def trial_streams(seed: int) -> dict[str, np.random.Generator]:
    """Independent generators for target, initialization, scheduling and shots."""
    children = np.random.SeedSequence(seed).spawn(4)
    names = ("target", "init", "schedule", "shots")
    return {k: np.random.default_rng(s) for k, s in zip(names, children)}


def run_trial(config: TrialConfig, seed: int, observable: Optional[Observable] = None) -> TrialTrace:
    """Optimize a fresh random circuit until the evaluation budget is spent.

    ``observable`` overrides the problem's own cost (used by tests); normally
    it is built from ``config.problem`` with the trial's target stream.
    """
    rngs = trial_streams(seed)
    obs = observable if observable is not None else config.problem.observable(rngs["target"])
    algo = config.algorithm
    circuit = init_circuit(obs.n_qubits, config.layers, algo.name, rngs["init"])
    budget = EvalBudget(limit=config.budget)
    oracle = CostOracle(obs, config.shots, rngs["shots"] if config.shots else None, budget)
    trace = TrialTrace(algo.name, algo.hyperparam, seed, config.budget)
    trace.records.append((0, oracle.metric(circuit)))

    def record(circ, _d):
        trace.records.append((budget.used, oracle.metric(circ)))

    adam = AdamState(lr=config.lr)
    i = 0
    while not budget.exhausted and budget.remaining > 0:
        i += 1
        before = budget.used
        if algo.name == "adam":
            adam_parameter_shift_sweep(circuit, oracle, adam, record)
        elif algo.name in ("rotosolve", "rotosolve_haar"):
            rotosolve_sweep(circuit, oracle, record)
        elif algo.name == "fraxis":
            fraxis_sweep(circuit, oracle, record)
        elif algo.name == "fqs":
            fqs_sweep(circuit, oracle, record)
        elif algo.name == "gate_hybrid":
            gate_specific_sweep(circuit, oracle, algo.p, rngs["schedule"], record)
        elif algo.name == "iter_hybrid_fqs":
            iteration_specific_sweep(circuit, oracle, int(algo.N), i, "fqs_every_N", record)
        else:
            iteration_specific_sweep(circuit, oracle, int(algo.N), i, "rotohaar_every_N", record)
        if budget.used == before:
            break
    trace.truncated = budget.exhausted
    return trace
