import math

import numpy as np
import pytest

from sdentropy.errors import InvalidArgumentError, NumericDomainError, SingularMatrixError
from sdentropy.linalg import HermitianPD, logdet, qr_positive, quad_form, sorted_qr
from sdentropy.rng import complex_normal


def _rand(n, seed):
    return complex_normal(np.random.default_rng(seed), (n, n))


def _check_factor(H, Q, R, perm):
    nH = np.linalg.norm(H)
    assert np.linalg.norm(Q @ R - H[:, perm]) <= 1e-9 * nH
    assert np.linalg.norm(Q.conj().T @ Q - np.eye(H.shape[0])) <= 1e-10
    assert np.all(np.tril(R, -1) == 0)
    d = np.diag(R)
    assert np.all(d.imag == 0) and np.all(d.real > 0)


def test_qr_identity():
    Q, R = qr_positive(np.eye(3))
    assert np.allclose(Q, np.eye(3)) and np.allclose(R, np.eye(3))


def test_qr_scaled_identity():
    Q, R = qr_positive(2 * np.eye(4))
    assert np.allclose(Q, np.eye(4)) and np.allclose(R, 2 * np.eye(4))


@pytest.mark.parametrize("seed", range(5))
def test_qr_random_reconstructs(seed):
    H = _rand(5, seed)
    Q, R = qr_positive(H)
    _check_factor(H, Q, R, np.arange(5))


def test_sorted_qr_diagonal():
    Q, R, perm = sorted_qr(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(np.diag(R).real, [1, 2, 3])
    assert list(perm) == [1, 2, 0]


def test_sorted_qr_identity_keeps_order():
    _, _, perm = sorted_qr(np.eye(4))
    assert list(perm) == [0, 1, 2, 3]


@pytest.mark.parametrize("seed", range(5))
def test_sorted_qr_random_reconstructs(seed):
    H = _rand(8, 100 + seed)
    Q, R, perm = sorted_qr(H)
    _check_factor(H, Q, R, perm)
    assert sorted(perm) == list(range(8))
    # first pivot is the weakest column
    assert perm[0] == np.argmin(np.linalg.norm(H, axis=0))


def test_singular_rejected():
    H = np.ones((3, 3))
    with pytest.raises(SingularMatrixError):
        qr_positive(H)
    with pytest.raises(SingularMatrixError):
        sorted_qr(np.zeros((2, 2)))


def test_non_square_rejected():
    with pytest.raises(InvalidArgumentError):
        qr_positive(np.ones((2, 3)))


def test_logdet_examples():
    assert logdet(np.eye(4)) == 0.0
    assert math.isclose(logdet(np.diag([2.0, 2.0])), 2 * math.log(2), rel_tol=0, abs_tol=1e-15)


def test_logdet_matches_eigenvalues():
    H = _rand(6, 3)
    K = 2.5 * H @ H.conj().T + np.eye(6)
    ref = np.sum(np.log(np.linalg.eigvalsh(K)))
    assert abs(logdet(K) - ref) <= 1e-9


def test_quad_form_examples():
    x = np.array([1 + 2j, -3, 0.5j])
    assert math.isclose(quad_form(np.eye(3), x), np.sum(np.abs(x) ** 2))
    assert math.isclose(quad_form(4 * np.eye(2), np.array([2.0, 0.0])), 1.0)


def test_quad_form_matches_inverse():
    H = _rand(5, 9)
    K = H @ H.conj().T + np.eye(5)
    x = _rand(5, 10)[:, 0]
    ref = (x.conj() @ np.linalg.inv(K) @ x).real
    assert abs(quad_form(K, x) - ref) <= 1e-8 * abs(ref)


def test_quad_form_columns_and_zero():
    K = HermitianPD(np.diag([1.0, 2.0]))
    X = np.array([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]])
    assert np.allclose(K.quad_form(X), [1.0, 2.0, 0.0])


def test_not_positive_definite():
    with pytest.raises(NumericDomainError):
        HermitianPD(np.diag([1.0, -1.0]))
