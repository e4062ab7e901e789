"""Pure-state simulation on ``2**n`` complex amplitudes.

States are plain 1-D ``numpy`` arrays of dtype ``complex128``. Qubit 0 is the
most significant bit of the basis index (the top wire of a circuit diagram).
Observables are either weighted Pauli strings or a negated rank-1 projector;
Pauli expectations are evaluated by bit-indexed traversal of the amplitudes,
so no ``2**n x 2**n`` operator is ever formed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Union

import numpy as np

from .errors import ConfigurationError, InvariantError, ShapeError

MAX_QUBITS = 20
PAULI_LETTERS = "IXYZ"

_NORM_TOL = 1e-10
_UNITARY_TOL = 1e-10


def _n_qubits_of(state: np.ndarray) -> int:
    dim = state.shape[0]
    n = dim.bit_length() - 1
    if state.ndim != 1 or dim != 1 << n or n < 1:
        raise ShapeError(f"state length {dim} is not a power of two >= 2")
    return n


def n_qubits(state: np.ndarray) -> int:
    """Number of qubits encoded by a state vector."""
    return _n_qubits_of(np.asarray(state))


def zero_state(n: int) -> np.ndarray:
    """Return ``|0...0>`` on ``n`` qubits."""
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise ConfigurationError(f"qubit count must be in [1, {MAX_QUBITS}], got {n!r}")
    psi = np.zeros(1 << int(n), dtype=complex)
    psi[0] = 1.0
    return psi


def is_unitary(matrix: np.ndarray, atol: float = _UNITARY_TOL) -> bool:
    m = np.asarray(matrix)
    return m.shape == (2, 2) and np.allclose(m.conj().T @ m, np.eye(2), rtol=0.0, atol=atol)


def _apply_1q(state: np.ndarray, gate: np.ndarray, qubit: int, n: int) -> np.ndarray:
    # (left, 2, right) view: the middle axis is the target qubit
    psi = state.reshape(1 << qubit, 2, 1 << (n - qubit - 1))
    return np.matmul(gate, psi).reshape(-1)


def apply_single_qubit(state: np.ndarray, gate: np.ndarray, qubit: int) -> np.ndarray:
    """Apply a 2x2 unitary to one qubit and return the new state.

    The input array is not modified.
    """
    state = np.asarray(state, dtype=complex)
    n = _n_qubits_of(state)
    gate = np.asarray(gate, dtype=complex)
    if not is_unitary(gate):
        raise InvariantError("single-qubit gate is not unitary")
    if not 0 <= qubit < n:
        raise IndexError(f"qubit {qubit} out of range for {n} qubits")
    return _apply_1q(state, gate, qubit, n)


@lru_cache(maxsize=256)
def cz_signs(n: int, pairs: tuple[tuple[int, int], ...]) -> np.ndarray:
    """Diagonal of the product of CZ gates on ``pairs`` (entries are +-1)."""
    idx = np.arange(1 << n)
    parity = np.zeros(1 << n, dtype=np.int64)
    for a, b in pairs:
        ba, bb = n - 1 - a, n - 1 - b
        parity ^= (idx >> ba) & (idx >> bb) & 1
    signs = 1.0 - 2.0 * parity
    signs.setflags(write=False)
    return signs


def apply_cz(state: np.ndarray, control: int, target: int) -> np.ndarray:
    """Controlled-Z between two qubits (symmetric in its arguments)."""
    state = np.asarray(state, dtype=complex)
    n = _n_qubits_of(state)
    if control == target:
        raise IndexError("CZ control and target must differ")
    for q in (control, target):
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for {n} qubits")
    return state * cz_signs(n, ((min(control, target), max(control, target)),))


# ---------------------------------------------------------------------------
# Observables


@dataclass(frozen=True)
class PauliTerm:
    coefficient: float
    letters: str

    def __post_init__(self):
        letters = self.letters.upper()
        if not letters or any(c not in PAULI_LETTERS for c in letters):
            raise ConfigurationError(f"invalid Pauli string {self.letters!r}")
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "coefficient", float(self.coefficient))

    @property
    def width(self) -> int:
        return len(self.letters)

    @property
    def is_identity(self) -> bool:
        return set(self.letters) == {"I"}

    def masks(self) -> tuple[int, int, int]:
        """(x_mask, z_mask, number of Y letters) in basis-index bit positions."""
        n = self.width
        x = z = ny = 0
        for k, c in enumerate(self.letters):
            bit = 1 << (n - 1 - k)
            if c in "XY":
                x |= bit
            if c in "ZY":
                z |= bit
            if c == "Y":
                ny += 1
        return x, z, ny


@dataclass
class _Group:
    """Terms sharing one bit-flip mask."""

    xmask: int
    term_index: np.ndarray  # positions into the term list
    signs: np.ndarray  # (terms, dim) of +-1
    phases: np.ndarray  # i**ny per term
    weights: np.ndarray  # coefficient-weighted phase*sign, summed over terms


@dataclass(frozen=True)
class PauliSum:
    """Real-weighted sum of Pauli strings of a common width."""

    terms: tuple[PauliTerm, ...]
    _groups: list = field(default=None, init=False, repr=False, compare=False)
    _offset: float = field(default=0.0, init=False, repr=False, compare=False)

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ConfigurationError("a PauliSum needs at least one term")
        widths = {t.width for t in terms}
        if len(widths) != 1:
            raise ShapeError(f"Pauli terms have mixed widths {sorted(widths)}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, str]]) -> "PauliSum":
        return cls(tuple(PauliTerm(c, s) for c, s in pairs))

    @property
    def n_qubits(self) -> int:
        return self.terms[0].width

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([t.coefficient for t in self.terms])

    def __len__(self) -> int:
        return len(self.terms)

    def _compiled(self) -> list[_Group]:
        if self._groups is None:
            n = self.n_qubits
            idx = np.arange(1 << n, dtype=np.int64)
            by_mask: dict[int, list[int]] = {}
            masks = [t.masks() for t in self.terms]
            for k, (x, _, _) in enumerate(masks):
                by_mask.setdefault(x, []).append(k)
            groups = []
            for x, members in by_mask.items():
                zs = np.array([masks[k][1] for k in members], dtype=np.int64)
                signs = 1.0 - 2.0 * (np.bitwise_count(idx[None, :] & zs[:, None]) & 1)
                phases = np.array([1j ** masks[k][2] for k in members])
                # identity terms are added as an exact constant, not c * |psi|^2
                coeffs = np.array([0.0 if self.terms[k].is_identity else self.terms[k].coefficient for k in members])
                weights = (coeffs * phases) @ signs
                groups.append(_Group(x, np.array(members), signs, phases, weights))
            offset = sum(t.coefficient for t in self.terms if t.is_identity)
            object.__setattr__(self, "_offset", float(offset))
            object.__setattr__(self, "_groups", groups)
        return self._groups

    def term_expectations(self, state: np.ndarray) -> np.ndarray:
        """Exact <psi|P_k|psi> for every term, in term order."""
        out = np.empty(len(self.terms))
        idx = None
        for g in self._compiled():
            if g.xmask == 0:
                overlap = np.abs(state) ** 2
            else:
                if idx is None:
                    idx = np.arange(state.shape[0])
                overlap = state[idx ^ g.xmask].conj() * state
            out[g.term_index] = (g.phases * (g.signs @ overlap)).real
        return out

    def expectation(self, state: np.ndarray) -> float:
        total = 0.0 + 0.0j
        idx = None
        groups = self._compiled()
        for g in groups:
            if g.xmask == 0:
                total += np.dot(g.weights, np.abs(state) ** 2)
            else:
                if idx is None:
                    idx = np.arange(state.shape[0])
                total += np.dot(g.weights, state[idx ^ g.xmask].conj() * state)
        if abs(total.imag) > 1e-10 * max(1.0, abs(total.real)):
            raise InvariantError(f"non-real expectation {total}")
        return float(total.real) + self._offset

    def expectations(self, states: np.ndarray) -> np.ndarray:
        """Exact expectation for each row of a (k, 2**n) batch of states."""
        total = np.zeros(states.shape[0], dtype=complex)
        idx = np.arange(states.shape[1])
        for g in self._compiled():
            if g.xmask == 0:
                total += (np.abs(states) ** 2) @ g.weights
            else:
                total += (states[:, idx ^ g.xmask].conj() * states) @ g.weights
        return total.real + self._offset

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "terms": [{"coeff": t.coefficient, "letters": t.letters} for t in self.terms],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PauliSum":
        obs = cls(tuple(PauliTerm(t["coeff"], t["letters"]) for t in doc["terms"]))
        if "n_qubits" in doc and doc["n_qubits"] != obs.n_qubits:
            raise ShapeError(f"n_qubits={doc['n_qubits']} but terms have width {obs.n_qubits}")
        return obs


@dataclass(frozen=True, eq=False)
class Projector:
    """The observable ``-|target><target|``; its expectation is minus the fidelity."""

    target: np.ndarray

    def __post_init__(self):
        target = np.array(self.target, dtype=complex)
        _n_qubits_of(target)
        if abs(np.vdot(target, target).real - 1.0) > _NORM_TOL:
            raise InvariantError("projector target is not unit-norm")
        target.setflags(write=False)
        object.__setattr__(self, "target", target)

    @property
    def n_qubits(self) -> int:
        return _n_qubits_of(self.target)

    def expectation(self, state: np.ndarray) -> float:
        return -fidelity(self.target, state)

    def expectations(self, states: np.ndarray) -> np.ndarray:
        return -np.minimum(1.0, np.abs(states @ self.target.conj()) ** 2)


Observable = Union[PauliSum, Projector]


def _check_width(state: np.ndarray, obs: Observable) -> None:
    n = _n_qubits_of(state)
    if n != obs.n_qubits:
        raise ShapeError(f"state has {n} qubits, observable has {obs.n_qubits}")


def expectation(state: np.ndarray, obs: Observable) -> float:
    """Exact ``<psi|M|psi>``."""
    state = np.asarray(state, dtype=complex)
    _check_width(state, obs)
    return obs.expectation(state)


def estimate_with_shots(
    state: np.ndarray, obs: Observable, shots_per_term: int, rng: np.random.Generator
) -> float:
    """Finite-shot estimate of ``<psi|M|psi>``.

    Each non-identity Pauli term is measured ``shots_per_term`` times in its
    own eigenbasis (binomial outcome counts); identity terms contribute their
    coefficient exactly. A projector is sampled as a single Bernoulli term
    with success probability equal to the fidelity.
    """
    if shots_per_term < 1:
        raise ConfigurationError("shots_per_term must be >= 1")
    state = np.asarray(state, dtype=complex)
    _check_width(state, obs)
    if isinstance(obs, Projector):
        f = fidelity(obs.target, state)
        return -rng.binomial(shots_per_term, f) / shots_per_term
    exact = obs.term_expectations(state)
    coeffs = obs.coefficients
    ident = np.array([t.is_identity for t in obs.terms])
    p_plus = np.clip((1.0 + exact[~ident]) / 2.0, 0.0, 1.0)
    k = rng.binomial(shots_per_term, p_plus)
    sampled = 2.0 * k / shots_per_term - 1.0
    return float(coeffs[ident].sum() + np.dot(coeffs[~ident], sampled))


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """``|<a|b>|**2`` for pure states, clamped to [0, 1]."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if _n_qubits_of(a) != _n_qubits_of(b):
        raise ShapeError("states have different qubit counts")
    return float(min(1.0, abs(np.vdot(a, b)) ** 2))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sqrt(max(0.0, 1.0 - fidelity(a, b))))


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    """Normalized vector of i.i.d. complex standard normals."""
    if n < 1 or n > MAX_QUBITS:
        raise ConfigurationError(f"qubit count must be in [1, {MAX_QUBITS}], got {n!r}")
    dim = 1 << n
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)

