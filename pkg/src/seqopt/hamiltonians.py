"""Cost-function builders: Heisenberg lattices, H2, and state-overlap projectors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, ConfigurationError, InvariantError
from .statevector import PauliSum, PauliTerm, Projector

DENSE_LIMIT = 12

# H2 in STO-3G at 0.742 Angstrom, 4 qubits (Jordan-Wigner).
H2_TERMS: tuple[tuple[str, float], ...] = (
    ("IIII", -0.09963387941370971),
    ("ZIII", 0.17110545123720233),
    ("IZII", 0.17110545123720233),
    ("ZZII", 0.16859349595532533),
    ("IIZI", -0.22250914236600539),
    ("ZIZI", 0.12051027989546245),
    ("IIIZ", -0.22250914236600539),
    ("ZIIZ", 0.16584090244119712),
    ("IZZI", 0.16584090244119712),
    ("IZIZ", 0.12051027989546245),
    ("IIZZ", 0.1743207725924201),
    ("YXXY", 0.04533062254573469),
    ("XYYX", 0.04533062254573469),
    ("XXYY", -0.04533062254573469),
    ("YYXX", -0.04533062254573469),
)


@dataclass(frozen=True)
class LatticeGraph:
    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for a, b in self.edges:
            if a == b:
                raise ConfigurationError(f"self-loop on vertex {a}")
            if not (0 <= a < self.n_vertices and 0 <= b < self.n_vertices):
                raise ConfigurationError(f"edge ({a}, {b}) out of range")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ConfigurationError(f"duplicate edge {key}")
            seen.add(key)

    @classmethod
    def cycle(cls, n: int) -> "LatticeGraph":
        return cls(n, tuple((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def grid(cls, rows: int, cols: int) -> "LatticeGraph":
        """Open-boundary rectangular grid, vertices numbered row-major."""
        edges = []
        for r in range(rows):
            for c in range(cols):
                v = r * cols + c
                if c + 1 < cols:
                    edges.append((v, v + 1))
                if r + 1 < rows:
                    edges.append((v, v + cols))
        return cls(rows * cols, tuple(edges))


def heisenberg(graph: LatticeGraph, J: float = 1.0, h: float = 1.0) -> PauliSum:
    """``J * sum_edges (XX + YY + ZZ) + h * sum_sites Z``."""
    n = graph.n_vertices
    terms = []
    for a, b in graph.edges:
        for p in "XYZ":
            letters = ["I"] * n
            letters[a] = letters[b] = p
            terms.append(PauliTerm(J, "".join(letters)))
    for v in range(n):
        letters = ["I"] * n
        letters[v] = "Z"
        terms.append(PauliTerm(h, "".join(letters)))
    return PauliSum(tuple(terms))


def heisenberg_1d(n: int, J: float = 1.0, h: float = 1.0) -> PauliSum:
    """Heisenberg model on a ring of ``n >= 3`` spins."""
    if n < 3:
        raise ConfigurationError(f"cyclic chain needs n >= 3, got {n}")
    return heisenberg(LatticeGraph.cycle(n), J, h)


def heisenberg_2d(rows: int, cols: int, J: float = 1.0, h: float = 1.0) -> PauliSum:
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise ConfigurationError(f"degenerate grid {rows}x{cols}")
    return heisenberg(LatticeGraph.grid(rows, cols), J, h)


def h2_hamiltonian() -> PauliSum:
    return PauliSum(tuple(PauliTerm(c, s) for s, c in H2_TERMS))


def projector_cost(target: np.ndarray) -> Projector:
    """``-|target><target|``: expectation is ``-F = T**2 - 1``."""
    target = np.asarray(target, dtype=complex)
    if abs(np.linalg.norm(target) - 1.0) > 1e-10:
        raise InvariantError("projector target must be unit-norm")
    return Projector(target)


def dense_matrix(obs: PauliSum) -> np.ndarray:
    """Dense Hermitian matrix of a Pauli sum, filled by bit indexing."""
    n = obs.n_qubits
    if n > DENSE_LIMIT:
        raise CapabilityError(f"dense matrix limited to {DENSE_LIMIT} qubits, got {n}")
    dim = 1 << n
    idx = np.arange(dim)
    mat = np.zeros((dim, dim), dtype=complex)
    for term in obs.terms:
        x, z, ny = term.masks()
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & z) & 1)
        # P|i> = i**ny * sign(i) |i ^ x>
        mat[idx ^ x, idx] += term.coefficient * (1j**ny) * signs
    return mat


def exact_ground_energy(obs: PauliSum) -> float:
    """Smallest eigenvalue of a Pauli sum (dense, ``n <= 12``)."""
    if not isinstance(obs, PauliSum):
        raise CapabilityError("ground energy oracle only accepts Pauli sums")
    return float(np.linalg.eigvalsh(dense_matrix(obs))[0])
