"""Column-stochastic matrices: validation, steady states, time reversal,
and the spectrum of the time-reversal composition P* P in l2(1/mu).
"""

from dataclasses import dataclass

import numpy as np
import scipy.io
import scipy.sparse
import scipy.sparse.csgraph

from . import linalg
from .errors import (
    DimensionError,
    InconsistentSteadyStateError,
    NonConvergenceError,
    NotStochasticError,
    ReducibleMatrixError,
)

NEG_CLAMP = 1e-14
COLSUM_TOL = 1e-12


@dataclass(frozen=True)
class StochasticMatrix:
    """Validated dense column-stochastic matrix."""

    mat: np.ndarray

    @property
    def n(self):
        return self.mat.shape[0]


@dataclass(frozen=True)
class ProbabilityVector:
    """Nonnegative vector summing to one."""

    probs: np.ndarray

    @property
    def n(self):
        return self.probs.shape[0]


@dataclass(frozen=True)
class SpectralData:
    """Eigendecomposition of P* P: lambdas descending, right vectors
    orthonormal in l2(1/mu), left vectors diag(1/mu) times right."""

    lambdas: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray


def validate(P):
    """Check a dense matrix is column stochastic; clamp tiny negatives."""
    P = np.array(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise DimensionError(f"validate: expected a square matrix, got {P.shape}")
    neg = P < -NEG_CLAMP
    if np.any(neg):
        j = int(np.argwhere(neg)[0, 1])
        raise NotStochasticError(
            f"validate: negative entry in column {j}", column=j
        )
    P = np.maximum(P, 0.0)
    sums = P.sum(axis=0)
    bad = np.abs(sums - 1.0) > COLSUM_TOL
    if np.any(bad):
        j = int(np.argmax(bad))
        raise NotStochasticError(
            f"validate: column {j} sums to {sums[j]:.17g}", column=j
        )
    return StochasticMatrix(mat=P)


def as_probability(v, tol=1e-12):
    """Wrap a vector as a ProbabilityVector after checking its invariants."""
    v = np.asarray(v, dtype=float)
    if np.any(v < 0):
        raise ValueError("probability vector has negative entries")
    if abs(v.sum() - 1.0) > tol:
        raise ValueError(f"probability vector sums to {v.sum():.17g}")
    return ProbabilityVector(probs=v)


def is_irreducible(P):
    """True iff the chain's directed transition graph is strongly connected."""
    pattern = scipy.sparse.csr_matrix(P.mat > 0)
    ncomp, _ = scipy.sparse.csgraph.connected_components(
        pattern, directed=True, connection="strong"
    )
    return ncomp == 1


def is_ptp_irreducible(P):
    """True iff the sparsity pattern of P^T P is connected.

    Columns i and j are adjacent iff they share a nonzero row; the pattern
    is never formed densely.
    """
    B = scipy.sparse.csc_matrix(P.mat > 0, dtype=bool)
    G = (B.T @ B).tocsr()
    ncomp, _ = scipy.sparse.csgraph.connected_components(
        G, directed=False
    )
    return ncomp == 1


def ensure_contractive(P):
    """Return P if P^T P is irreducible, else the lazy chain (I + P)/2."""
    if not is_irreducible(P):
        raise ReducibleMatrixError("ensure_contractive: P is reducible")
    if is_ptp_irreducible(P):
        return P
    half = 0.5 * (np.eye(P.n) + P.mat)
    return StochasticMatrix(mat=half)


def _apply_power(Pbar, z, k, renorm_every=64):
    """Apply Pbar to z k times, renormalizing to total mass one periodically.

    Chunks of renorm_every applications are carried out through a
    precomputed matrix power; renormalization between chunks kills drift.
    """
    n = Pbar.shape[0]
    if k < renorm_every:
        for _ in range(k):
            z = Pbar @ z
        s = z.sum()
        return z / s if s != 0 else z
    block = np.linalg.matrix_power(Pbar, renorm_every)
    full, rem = divmod(k, renorm_every)
    for _ in range(full):
        z = block @ z
        z = z / z.sum()
    for _ in range(rem):
        z = Pbar @ z
    return z / z.sum()


def steady_state(P, tol=1e-9, kpow=2**15):
    """Steady state by QR null-vector start plus power refinement.

    Works on the lazy matrix Pbar = (I + P)/2, which has the same steady
    state and no periodicity. The initial guess is the null vector of
    I - Pbar; refinement applies Pbar kpow times per round until both the
    self-consistency and step-change criteria drop below tol.
    """
    if not is_irreducible(P):
        raise ReducibleMatrixError("steady_state: P is reducible")
    A = P.mat
    n = P.n
    if n == 1:
        return ProbabilityVector(probs=np.array([1.0]))
    Pbar = 0.5 * (np.eye(n) + A)
    v = linalg.qr_null_vector(np.eye(n) - Pbar)
    if v.sum() < 0:
        v = -v
    v = np.maximum(v, 0.0)
    s = v.sum()
    z_old = v / s if s > 0 else np.full(n, 1.0 / n)
    for _ in range(50):
        z_new = _apply_power(Pbar, z_old, kpow)
        if np.all(z_new > 0):
            resid = np.max(np.abs(z_new - A @ z_new) / z_new)
            change = np.max(np.abs(z_new - z_old) / np.maximum(z_old, 1e-300))
            if resid < tol and change < tol:
                return ProbabilityVector(probs=z_new / z_new.sum())
        z_old = z_new
    raise NonConvergenceError("steady_state: no convergence in 50 refinement rounds")


def time_reversal(P, mu):
    """Time reversal diag(mu) P^T diag(1/mu); column stochastic, fixes mu."""
    m = mu.probs
    if np.any(m <= 0):
        raise ValueError("time_reversal: mu must be strictly positive")
    if np.max(np.abs(P.mat @ m - m)) > 1e-8:
        raise InconsistentSteadyStateError("time_reversal: mu is not invariant")
    R = (m[:, None] * P.mat.T) / m[None, :]
    return StochasticMatrix(mat=R)


def deviation(P, mu):
    """P minus its rank-one ergodic limit: P - mu 1^T."""
    return P.mat - np.outer(mu.probs, np.ones(P.n))


def is_reversible(P, mu, tol=1e-10):
    """Detailed balance check: P equals its own time reversal entrywise."""
    return np.max(np.abs(time_reversal(P, mu).mat - P.mat)) <= tol


def pstar_p_spectrum(P, mu):
    """Spectrum and eigenvectors of P* P, the self-adjoint composition of
    the chain with its time reversal in l2(1/mu).

    The similarity M = diag(1/sqrt(mu)) P diag(sqrt(mu)) makes M^T M plain
    symmetric; eigenvectors map back through diag(sqrt(mu)). The leading
    pair is replaced by the analytic (mu, ones).
    """
    m = mu.probs
    if np.any(m <= 0):
        raise ValueError("pstar_p_spectrum: mu must be strictly positive")
    sm = np.sqrt(m)
    M = (P.mat * sm[None, :]) / sm[:, None]
    pairs = linalg.sym_eigs(M.T @ M)
    lambdas = pairs.values.copy()
    if abs(lambdas[0] - 1.0) > 1e-8:
        raise InconsistentSteadyStateError(
            f"pstar_p_spectrum: leading eigenvalue {lambdas[0]:.12g} != 1"
        )
    right = sm[:, None] * pairs.vectors
    # deterministic sign: largest-magnitude component positive
    idx = np.argmax(np.abs(right), axis=0)
    signs = np.sign(right[idx, np.arange(right.shape[1])])
    signs[signs == 0] = 1.0
    right = right * signs[None, :]
    lambdas[0] = 1.0
    right[:, 0] = m
    left = right / m[:, None]
    return SpectralData(lambdas=lambdas, right_vectors=right, left_vectors=left)


def save_matrix(path, P):
    """Write a matrix in Matrix Market coordinate format."""
    scipy.io.mmwrite(str(path), scipy.sparse.coo_matrix(P.mat))


def load_matrix(path, transpose=False):
    """Read a Matrix Market file as a validated stochastic matrix.

    transpose=True ingests row-stochastic data by transposing on load.
    """
    M = scipy.io.mmread(str(path))
    if scipy.sparse.issparse(M):
        M = M.toarray()
    M = np.asarray(M, dtype=float)
    if transpose:
        M = M.T
    return validate(M)


def save_vector(path, mu):
    """Write a probability vector, one float per line."""
    np.savetxt(str(path), mu.probs, fmt="%.17g")


def load_vector(path):
    """Read a probability vector written one float per line."""
    return as_probability(np.loadtxt(str(path), dtype=float))
