import numpy as np
import pytest

from seqopt.errors import ConfigurationError
from seqopt.linalg import jacobi_eigh, lowest_eigenpair_sym


def random_symmetric(k, rng):
    a = rng.standard_normal((k, k))
    return (a + a.T) / 2


def char_poly_roots(a):
    """Eigenvalues as roots of det(lambda I - A), independent of any eigensolver."""
    return np.sort(np.roots(np.poly(a)).real)


def test_diagonal():
    value, vec = lowest_eigenpair_sym(np.diag([3.0, 1.0, 2.0]))
    assert value == 1.0
    np.testing.assert_array_equal(vec, [0, 1, 0])


def test_degenerate_lowest():
    s = np.diag([1.0, -1.0, -1.0, 1.0])
    value, vec = lowest_eigenpair_sym(s)
    assert value == -1.0
    assert np.linalg.norm(s @ vec - value * vec) < 1e-10
    assert abs(vec[0]) < 1e-12 and abs(vec[3]) < 1e-12


@pytest.mark.parametrize("k", [3, 4])
def test_matches_characteristic_polynomial(k):
    rng = np.random.default_rng(k)
    for _ in range(200):
        a = random_symmetric(k, rng)
        values, vectors = jacobi_eigh(a)
        np.testing.assert_allclose(np.sort(values), char_poly_roots(a), atol=1e-9)
        np.testing.assert_allclose(vectors.T @ vectors, np.eye(k), atol=1e-12)
        value, vec = lowest_eigenpair_sym(a)
        assert abs(value - char_poly_roots(a)[0]) < 1e-9
        assert np.linalg.norm(a @ vec - value * vec) < 1e-10
        assert abs(np.linalg.norm(vec) - 1) < 1e-12
        assert vec[np.flatnonzero(np.abs(vec) > 1e-12)[0]] > 0


def test_off_diagonal_converges():
    rng = np.random.default_rng(3)
    a = random_symmetric(4, rng)
    values, vectors = jacobi_eigh(a)
    rotated = vectors.T @ a @ vectors
    off = rotated - np.diag(np.diag(rotated))
    assert np.linalg.norm(off) < 1e-12 * np.linalg.norm(a) * 10


def test_deterministic():
    a = random_symmetric(4, np.random.default_rng(11))
    v1 = lowest_eigenpair_sym(a)
    v2 = lowest_eigenpair_sym(a.copy())
    assert v1[0] == v2[0]
    np.testing.assert_array_equal(v1[1], v2[1])


def test_rejects_non_symmetric():
    with pytest.raises(ConfigurationError):
        lowest_eigenpair_sym(np.array([[1.0, 2.0], [0.0, 1.0]]))
