"""Single-qubit gate parameterizations and conversions between them.

Four variants are supported:

* :class:`FixedAngle` -- ``cos(t/2) I - i sin(t/2) P`` with ``P`` in {X, Y, Z}
* :class:`HaarAngle`  -- the same with the generator ``V Z V^dagger``
* :class:`Axis`       -- a pi rotation ``-i (n . sigma)`` about a unit axis
* :class:`Quat`       -- ``q0 I - i (q1 X + q2 Y + q3 Z)`` for a unit quaternion

Every variant maps to an SU(2) matrix through :func:`gate_matrix`.
:func:`decompose_unitary` goes the other way, writing an SU(2) matrix as
``exp(-i theta/2 V Z V^dagger)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConfigurationError, InvariantError

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"X": X, "Y": Y, "Z": Z}

_TOL = 1e-10


def _unit(v, what: str) -> np.ndarray:
    v = np.array(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > _TOL:
        raise InvariantError(f"{what} is not unit-norm (|v| = {np.linalg.norm(v)!r})")
    v.setflags(write=False)
    return v


def _check_unitary(u: np.ndarray, what: str = "matrix") -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not np.allclose(u.conj().T @ u, I2, rtol=0, atol=_TOL):
        raise InvariantError(f"{what} is not a 2x2 unitary")
    return u


def wrap_angle(theta: float) -> float:
    """Map an angle into (-pi, pi]."""
    t = float(np.mod(theta + np.pi, 2 * np.pi) - np.pi)
    return np.pi if t == -np.pi else t


# ---------------------------------------------------------------------------
# Quaternions and axes


def quaternion_to_matrix(q) -> np.ndarray:
    q0, q1, q2, q3 = _unit(q, "quaternion")
    return np.array(
        [[q0 - 1j * q3, -q2 - 1j * q1], [q2 - 1j * q1, q0 + 1j * q3]], dtype=complex
    )


def matrix_to_quaternion(u: np.ndarray) -> np.ndarray:
    """Quaternion of a 2x2 unitary, after removing its global phase.

    Matrices outside SU(2) are divided by a square root of their determinant
    (the sign of the result is arbitrary, which leaves every expectation value
    unchanged). SU(2) inputs are read off as-is and round-trip exactly.
    """
    u = _check_unitary(u)
    det = np.linalg.det(u)
    if abs(det - 1.0) > 1e-12:
        u = u / np.sqrt(det)
    q = np.array(
        [
            (u[0, 0] + u[1, 1]).real / 2,
            -(u[0, 1] + u[1, 0]).imag / 2,
            (u[1, 0] - u[0, 1]).real / 2,
            (u[1, 1] - u[0, 0]).imag / 2,
        ]
    )
    return q / np.linalg.norm(q)


def angles_to_quaternion(psi: float, theta: float, phi: float) -> np.ndarray:
    """Rotation by ``psi`` about the axis with zenith ``theta`` and azimuth ``phi``."""
    s = np.sin(psi / 2)
    return np.array(
        [
            np.cos(psi / 2),
            s * np.cos(theta),
            s * np.sin(theta) * np.cos(phi),
            s * np.sin(theta) * np.sin(phi),
        ]
    )


def axis_from_spherical(theta: float, phi: float) -> np.ndarray:
    # zenith measured from the x axis: (cos t, sin t cos p, sin t sin p)
    return np.array([np.cos(theta), np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi)])


def random_axis(rng: np.random.Generator) -> np.ndarray:
    """Uniformly distributed point on the unit sphere."""
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# Haar sampling and conjugated generators


def haar_random_u2(rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed element of U(2).

    QR of a complex Ginibre matrix, with the phases of R's diagonal moved into
    Q so that the result is exactly Haar rather than biased by LAPACK's sign
    convention.
    """
    g = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def conjugated_generator(v: np.ndarray) -> np.ndarray:
    """``V Z V^dagger``: Hermitian, unitary and traceless for unitary ``V``."""
    v = _check_unitary(v, "conjugator")
    return v @ Z @ v.conj().T


def rotation(theta: float, generator: np.ndarray) -> np.ndarray:
    """``exp(-i theta/2 G)`` for an involutory generator ``G``."""
    return np.cos(theta / 2) * I2 - 1j * np.sin(theta / 2) * generator


def decompose_unitary(u: np.ndarray) -> tuple[float, np.ndarray]:
    """Write ``u`` in SU(2) as ``exp(-i theta/2 V Z V^dagger)``.

    ``V`` carries the eigenvectors of ``u`` as columns, ordered so that the
    first column (paired with Z's +1 eigenvector) has eigenvalue
    ``lambda = exp(-i theta/2)`` with ``Im lambda <= 0``. That gives
    ``theta = -2 arg(lambda)`` in ``[0, 2 pi]``: ``[0, pi]`` whenever
    ``Re tr u >= 0``, and ``(pi, 2 pi]`` for the other half of SU(2), where no
    angle in ``(-pi, pi]`` reproduces ``u`` exactly. ``u = +I`` and ``u = -I``
    return ``V = I`` with ``theta = 0`` and ``2 pi`` respectively.
    """
    u = _check_unitary(u)
    det = np.linalg.det(u)
    if abs(det - 1.0) > 1e-8:
        raise ConfigurationError(f"decompose_unitary expects det = 1, got {det}")
    q = matrix_to_quaternion(u)
    vec = q[1:]
    s = float(np.linalg.norm(vec))
    # eigenvalues of u are q0 -+ i s, for eigenvectors of n.sigma with +-1
    theta = 2.0 * float(np.arctan2(s, q[0]))
    if s < 1e-14:
        return theta, I2.copy()
    nx, ny, nz = vec / s
    # +1 eigenvector of n.sigma, built from whichever column is better conditioned
    if nz >= 0:
        a, b = 1.0 + nz, nx + 1j * ny
    else:
        a, b = nx - 1j * ny, 1.0 - nz
    norm = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
    a, b = a / norm, b / norm
    v = np.array([[a, -np.conj(b)], [b, np.conj(a)]], dtype=complex)
    return theta, v


# ---------------------------------------------------------------------------
# Gate parameter variants


@dataclass(frozen=True)
class FixedAngle:
    theta: float
    generator: str = "Z"

    def __post_init__(self):
        if self.generator not in PAULI:
            raise ConfigurationError(f"generator must be one of X, Y, Z, got {self.generator!r}")
        object.__setattr__(self, "theta", float(self.theta))

    def matrix(self) -> np.ndarray:
        return rotation(self.theta, PAULI[self.generator])

    def with_theta(self, theta: float) -> "FixedAngle":
        return FixedAngle(theta, self.generator)

    def generator_matrix(self) -> np.ndarray:
        return PAULI[self.generator]


@dataclass(frozen=True, eq=False)
class HaarAngle:
    theta: float
    conjugator: np.ndarray

    def __post_init__(self):
        v = _check_unitary(self.conjugator, "conjugator").copy()
        v.setflags(write=False)
        object.__setattr__(self, "conjugator", v)
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "_generator", conjugated_generator(v))

    def matrix(self) -> np.ndarray:
        return rotation(self.theta, self._generator)

    def with_theta(self, theta: float) -> "HaarAngle":
        return HaarAngle(theta, self.conjugator)

    def generator_matrix(self) -> np.ndarray:
        return self._generator


@dataclass(frozen=True, eq=False)
class Axis:
    axis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "axis", _unit(self.axis, "axis"))

    def matrix(self) -> np.ndarray:
        nx, ny, nz = self.axis
        return -1j * (nx * X + ny * Y + nz * Z)


@dataclass(frozen=True, eq=False)
class Quat:
    q: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", _unit(self.q, "quaternion"))

    def matrix(self) -> np.ndarray:
        return quaternion_to_matrix(self.q)


GateParam = Union[FixedAngle, HaarAngle, Axis, Quat]
AngleParam = Union[FixedAngle, HaarAngle]


def gate_matrix(p: GateParam) -> np.ndarray:
    return p.matrix()


def to_quat(p: GateParam) -> Quat:
    if isinstance(p, Quat):
        return p
    return Quat(matrix_to_quaternion(p.matrix()))


def to_haar_angle(p: GateParam) -> HaarAngle:
    if isinstance(p, HaarAngle):
        return p
    u = p.matrix()
    det = np.linalg.det(u)
    if abs(det - 1.0) > 1e-8:
        u = u / np.sqrt(det)
    theta, v = decompose_unitary(u)
    return HaarAngle(theta, v)


# ---------------------------------------------------------------------------
# JSON


def _cplx(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def param_to_dict(p: GateParam) -> dict:
    if isinstance(p, FixedAngle):
        return {"type": "FixedAngle", "theta": p.theta, "generator": p.generator}
    if isinstance(p, HaarAngle):
        return {"type": "HaarAngle", "theta": p.theta, "conjugator": _cplx(p.conjugator)}
    if isinstance(p, Axis):
        return {"type": "Axis", "axis": [float(x) for x in p.axis]}
    if isinstance(p, Quat):
        return {"type": "Quat", "q": [float(x) for x in p.q]}
    raise TypeError(f"not a gate parameter: {p!r}")


def param_from_dict(doc: dict) -> GateParam:
    kind = doc.get("type")
    if kind == "FixedAngle":
        return FixedAngle(doc["theta"], doc["generator"])
    if kind == "HaarAngle":
        v = np.array([[complex(re, im) for re, im in row] for row in doc["conjugator"]])
        return HaarAngle(doc["theta"], v)
    if kind == "Axis":
        return Axis(np.array(doc["axis"]))
    if kind == "Quat":
        return Quat(np.array(doc["q"]))
    raise ConfigurationError(f"unknown gate parameter type {kind!r}")
