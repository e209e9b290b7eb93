"""Dense real linear algebra with weighted inner products.

Everything downstream measures vectors and operators in a weighted l2
norm, so alongside the standard factorizations this module provides the
diag(sqrt(w)) similarity trick that turns self-adjoint-in-l2(w) operators
into plain symmetric matrices.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    AmbiguousNullspaceError,
    DimensionError,
    EigenConvergenceError,
    NotSymmetricError,
    SingularMatrixError,
)

# Dimension above which spectral_radius_symmetric_psd switches from a full
# symmetric eigensolve to shifted power iteration.
_POWER_ITERATION_DIM = 1500


@dataclass(frozen=True)
class EigenPairs:
    """Real eigenvalues sorted descending with matching eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def weighted_inner(x, y, w):
    """Inner product sum_i x_i y_i w_i for a positive weight vector w."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    if x.shape != y.shape or x.shape != w.shape:
        raise DimensionError(
            f"weighted_inner: shapes {x.shape}, {y.shape}, {w.shape} differ"
        )
    if np.any(w <= 0):
        raise ValueError("weighted_inner: weights must be strictly positive")
    return float(np.sum(x * y * w))


def weighted_norm(x, w):
    """l2(w) norm of x."""
    return np.sqrt(weighted_inner(x, x, w))


def lu_solve(A, B):
    """Solve A X = B by LU with partial pivoting."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"lu_solve: A must be square, got {A.shape}")
    if B.shape[0] != A.shape[0]:
        raise DimensionError(
            f"lu_solve: B has {B.shape[0]} rows, expected {A.shape[0]}"
        )
    with warnings.catch_warnings():
        # a zero pivot is reported through SingularMatrixError below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    if np.min(np.abs(np.diag(lu))) < 1e-300:
        raise SingularMatrixError("lu_solve: zero pivot encountered")
    return scipy.linalg.lu_solve((lu, piv), B, check_finite=False)


def qr_null_vector(A):
    """Unit vector spanning the null space of a rank N-1 square matrix.

    Householder QR of A^T: the last column of the orthogonal factor is
    orthogonal to every row of A^T's column space, i.e. lies in ker(A).
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"qr_null_vector: A must be square, got {A.shape}")
    n = A.shape[0]
    if n == 1:
        if abs(A[0, 0]) > 1e-10:
            raise AmbiguousNullspaceError("qr_null_vector: 1x1 matrix has no null space")
        return np.array([1.0])
    scale = np.linalg.norm(A)
    Q, R = np.linalg.qr(A.T, mode="complete")
    rdiag = np.sort(np.abs(np.diag(R)))
    if rdiag[1] < 1e-10 * max(scale, 1e-300):
        raise AmbiguousNullspaceError(
            "qr_null_vector: at least two negligible R diagonals; nullity > 1"
        )
    return Q[:, -1]


def sym_eigs(S):
    """Full spectrum of a symmetric matrix, eigenvalues descending.

    Ties keep the ascending-solver order reversed stably so results are
    deterministic.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionError(f"sym_eigs: S must be square, got {S.shape}")
    tol = 1e-12 * max(1.0, np.max(np.abs(S)))
    if np.max(np.abs(S - S.T)) > tol:
        raise NotSymmetricError("sym_eigs: matrix is not symmetric to tolerance")
    w, V = np.linalg.eigh(0.5 * (S + S.T))
    order = np.argsort(-w, kind="stable")
    return EigenPairs(values=w[order], vectors=V[:, order])


def general_eigenvalues(A):
    """All eigenvalues of a square real matrix, sorted by descending modulus."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"general_eigenvalues: A must be square, got {A.shape}")
    try:
        vals = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(f"general_eigenvalues: {exc}") from exc
    order = np.lexsort((np.arange(len(vals)), -np.abs(vals)))
    return vals[order]


def _similarity_symmetrize(S, w, tol):
    """diag(sqrt(w)) S diag(1/sqrt(w)), verified symmetric to tol."""
    sw = np.sqrt(np.asarray(w, dtype=float))
    T = (sw[:, None] * S) / sw[None, :]
    scale = max(1.0, np.max(np.abs(T)))
    if np.max(np.abs(T - T.T)) > tol * scale:
        raise NotSymmetricError(
            "matrix is not self-adjoint in the given weighted inner product"
        )
    return 0.5 * (T + T.T)


def spectral_radius_symmetric_psd(S, w):
    """Largest eigenvalue of an operator self-adjoint in l2(w).

    Small problems go through a full symmetric eigensolve of the
    similarity-transformed matrix; large ones use shifted power iteration.
    """
    S = np.asarray(S, dtype=float)
    w = np.asarray(w, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionError(f"spectral_radius_symmetric_psd: S must be square")
    if S.shape[0] != w.shape[0]:
        raise DimensionError("spectral_radius_symmetric_psd: weight length mismatch")
    T = _similarity_symmetrize(S, w, tol=1e-10)
    n = T.shape[0]
    if n <= _POWER_ITERATION_DIM:
        return float(np.max(np.linalg.eigvalsh(T)))
    return _shifted_power_largest(T, rel_tol=1e-12)


def _shifted_power_largest(T, rel_tol, max_iter=100_000):
    """Largest (algebraic) eigenvalue of symmetric T by power iteration.

    A Gershgorin shift makes the target eigenvalue dominant in modulus even
    when T has large negative eigenvalues.
    """
    n = T.shape[0]
    radii = np.sum(np.abs(T), axis=1) - np.abs(np.diag(T))
    shift = max(0.0, -float(np.min(np.diag(T) - radii)))
    rng = np.random.default_rng(12345)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        u = T @ v + shift * v
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return 0.0
        v_new = u / nu
        lam_new = float(v_new @ (T @ v_new))
        if abs(lam_new - lam) <= rel_tol * max(abs(lam_new), 1e-300):
            return lam_new
        lam = lam_new
        v = v_new
    raise EigenConvergenceError(
        "shifted power iteration did not reach the requested tolerance"
    )


def weighted_operator_norm(M, w):
    """Operator norm of M on l2(w), via the self-adjoint composition M* M."""
    M = np.asarray(M, dtype=float)
    w = np.asarray(w, dtype=float)
    # adjoint in l2(w): M* = diag(1/w) M^T diag(w)
    MsM = (M.T * w[None, :]) @ M / w[:, None]
    val = spectral_radius_symmetric_psd(MsM, w)
    return float(np.sqrt(max(val, 0.0)))
