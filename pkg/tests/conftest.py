"""Dense reference simulators used as independent oracles.

Everything here builds full ``2**n x 2**n`` matrices with ``np.kron`` and
never touches the bit-indexed code paths under test.
"""
from functools import reduce

import numpy as np
import pytest

PAULI_DENSE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_all(mats):
    return reduce(np.kron, mats)


def embed(u, qubit, n):
    """``I x ... x u x ... x I`` with qubit 0 as the leftmost factor."""
    mats = [np.eye(2, dtype=complex)] * n
    mats = list(mats)
    mats[qubit] = u
    return kron_all(mats)


def dense_cz(a, b, n):
    dim = 2**n
    diag = np.ones(dim, dtype=complex)
    for i in range(dim):
        bits = format(i, f"0{n}b")
        if bits[a] == "1" and bits[b] == "1":
            diag[i] = -1
    return np.diag(diag)


def dense_pauli_sum(pairs, n):
    return sum(c * kron_all([PAULI_DENSE[ch] for ch in s]) for c, s in pairs)


def dense_observable(obs):
    from seqopt.statevector import Projector

    if isinstance(obs, Projector):
        return -np.outer(obs.target, obs.target.conj())
    return dense_pauli_sum([(t.coefficient, t.letters) for t in obs.terms], obs.n_qubits)


def dense_layer_entangler(n):
    pairs = [(q, q + 1) for q in range(0, n - 1, 2)] + [(q, q + 1) for q in range(1, n - 1, 2)]
    out = np.eye(2**n, dtype=complex)
    for a, b in pairs:
        out = dense_cz(a, b, n) @ out
    return out


def dense_circuit_unitary(mats, n, layers, start=0, stop=None):
    """Product of slots ``start .. stop-1`` with layer entanglers, as a dense matrix."""
    stop = n * layers if stop is None else stop
    ent = dense_layer_entangler(n)
    out = np.eye(2**n, dtype=complex)
    for d in range(start, stop):
        out = embed(mats[d], d % n, n) @ out
        if d % n == n - 1:
            out = ent @ out
    return out


def dense_cost(mats, n, layers, m_dense):
    psi = dense_circuit_unitary(mats, n, layers)[:, 0]
    return float(np.real(psi.conj() @ m_dense @ psi))


def slot_landscape(mats, n, layers, d, m_dense, gates):
    """Dense costs with slot ``d`` replaced by each 2x2 matrix in ``gates``."""
    before = dense_circuit_unitary(mats, n, layers, 0, d)[:, 0]
    # everything after slot d, including the entangler that closes its layer
    after = dense_circuit_unitary(mats, n, layers, d + 1)
    if d % n == n - 1:
        after = after @ dense_layer_entangler(n)
    q = d % n
    tensor = before.reshape(2**q, 2, 2 ** (n - q - 1))
    gates = np.asarray(gates)
    psi = np.einsum("kab,lbr->klar", gates, tensor).reshape(len(gates), 2**n) @ after.T
    return np.real(np.einsum("ki,ij,kj->k", psi.conj(), m_dense, psi))


def random_unitary(rng):
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / abs(np.diag(r)))


def random_state_vec(n, rng):
    z = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return z / np.linalg.norm(z)


def random_pauli_pairs(n, rng, k=6):
    pairs = []
    for _ in range(k):
        letters = "".join(rng.choice(list("IXYZ"), size=n))
        pairs.append((float(rng.normal()), letters))
    return pairs


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_instance(rng, variant, n=3, layers=2, n_terms=6):
    """Random circuit (all slots of one variant) plus a random Pauli-sum cost.

    Returns ``(circuit, observable, dense_cost_matrix)``.
    """
    from seqopt.circuit import AnsatzCircuit
    from seqopt.gates import Axis, FixedAngle, HaarAngle, Quat, haar_random_u2, matrix_to_quaternion, random_axis
    from seqopt.statevector import PauliSum

    slots = []
    for _ in range(n * layers):
        if variant == "fixed":
            slots.append(FixedAngle(rng.uniform(-np.pi, np.pi), "XYZ"[rng.integers(3)]))
        elif variant == "haar":
            slots.append(HaarAngle(rng.uniform(-np.pi, np.pi), haar_random_u2(rng)))
        elif variant == "axis":
            slots.append(Axis(random_axis(rng)))
        else:
            slots.append(Quat(matrix_to_quaternion(haar_random_u2(rng))))
    pairs = random_pauli_pairs(n, rng, n_terms)
    return AnsatzCircuit(n, layers, slots), PauliSum.from_pairs(pairs), dense_pauli_sum(pairs, n)


def slot_matrices(circuit):
    return [circuit.matrix(d) for d in range(circuit.n_slots)]


# One line per acceptance criterion, shown in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
