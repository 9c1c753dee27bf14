"""Dense complex linear algebra used by the tree searches and estimators.

``qr_positive`` and ``sorted_qr`` return ``R`` with a real, nonnegative
diagonal so that the per-stream gains ``|r_kk|**2`` are unambiguous.
"""

import numpy as np
from scipy.linalg import solve_triangular

from .errors import InvalidArgumentError, NumericDomainError, SingularMatrixError

__all__ = ["qr_positive", "sorted_qr", "HermitianPD", "logdet", "quad_form"]

RANK_TOL = 1e-12


def _as_square(H):
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {H.shape}")
    return H


def _householder_qr(H, pivot):
    """Householder QR, optionally choosing the weakest column at each step.

    Returns ``(Q, R, perm)`` with ``Q @ R == H[:, perm]``.
    """
    A = _as_square(H).copy()
    n = A.shape[0]
    scale = np.linalg.norm(A)
    Q = np.eye(n, dtype=complex)
    perm = np.arange(n)
    if scale == 0.0:
        raise SingularMatrixError("zero matrix")

    for k in range(n):
        if pivot:
            norms = np.einsum("ij,ij->j", A[k:, k:].conj(), A[k:, k:]).real
            j = k + int(np.argmin(norms))
            if j != k:
                A[:, [k, j]] = A[:, [j, k]]
                perm[[k, j]] = perm[[j, k]]

        x = A[k:, k]
        alpha = np.linalg.norm(x)
        if alpha <= RANK_TOL * scale:
            raise SingularMatrixError(
                f"|r_{k}{k}| = {alpha:.3e} below rank tolerance"
            )
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        u = x.copy()
        u[0] += phase * alpha
        u /= np.linalg.norm(u)
        # reflector P = I - 2 u u^H maps x to -phase * alpha * e_1
        A[k:, k:] -= 2.0 * np.outer(u, u.conj() @ A[k:, k:])
        Q[:, k:] -= 2.0 * np.outer(Q[:, k:] @ u, u.conj())
        A[k + 1:, k] = 0.0

        # rotate row k / column k so the diagonal becomes +alpha
        d = A[k, k]
        ph = d / abs(d)
        A[k, k:] *= ph.conjugate()
        Q[:, k] *= ph
        A[k, k] = abs(d)

    return Q, np.triu(A), perm


def qr_positive(H):
    """QR factorization with a real nonnegative diagonal on ``R``.

    Parameters
    ----------
    H : (N, N) array_like
        Square, full-rank complex matrix.

    Returns
    -------
    Q : (N, N) ndarray
        Unitary factor.
    R : (N, N) ndarray
        Upper-triangular factor, ``diag(R) > 0``.

    Raises
    ------
    SingularMatrixError
        If some ``|r_kk| <= 1e-12 * ||H||_F``.
    """
    Q, R, _ = _householder_qr(H, pivot=False)
    return Q, R


def sorted_qr(H):
    """Greedy sorted QR: weakest remaining column first.

    At every Householder step the remaining column with the smallest
    residual norm is moved into position, so ``|r_kk|`` tends to increase
    with ``k``. Monotonicity is not guaranteed.

    Returns
    -------
    Q, R : ndarray
        Factors of ``H[:, perm]``.
    perm : (N,) ndarray of int
        Column order; ``Q @ R == H[:, perm]``.
    """
    return _householder_qr(H, pivot=True)


class HermitianPD:
    """Hermitian positive-definite matrix with a cached Cholesky factor."""

    def __init__(self, matrix):
        K = _as_square(matrix)
        K = 0.5 * (K + K.conj().T)
        try:
            L = np.linalg.cholesky(K)
        except np.linalg.LinAlgError as exc:
            raise NumericDomainError("matrix is not positive definite") from exc
        self.matrix = K
        self.chol = L
        self._logdet = 2.0 * float(np.sum(np.log(L.diagonal().real)))

    @property
    def n(self):
        return self.matrix.shape[0]

    def logdet(self):
        """Natural log of the determinant."""
        return self._logdet

    def whiten(self, x):
        """Return ``L^{-1} x`` (``x`` may hold several columns)."""
        return solve_triangular(self.chol, x, lower=True, check_finite=False)

    def quad_form(self, x):
        """``x^H K^{-1} x``; for a 2-D ``x`` one value per column."""
        y = self.whiten(np.asarray(x, dtype=complex))
        return np.sum(y.real ** 2 + y.imag ** 2, axis=0)


def logdet(K):
    if not isinstance(K, HermitianPD):
        K = HermitianPD(K)
    return K.logdet()


def quad_form(K, x):
    if not isinstance(K, HermitianPD):
        K = HermitianPD(K)
    return float(K.quad_form(x)) if np.ndim(x) == 1 else K.quad_form(x)
