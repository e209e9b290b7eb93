"""Partitions of the fine space and the coarse operators built on them:
aggregation A, disaggregation D(nu), coarse matrix C(nu) = A P D(nu),
orthogonal projection Pi(nu) = D(nu) A, and the oblique coarse projection
S(nu) that governs the coarse-correction error.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .chain import StochasticMatrix, ProbabilityVector, validate
from .errors import PartitionError, ZeroMassStratumError


@dataclass(frozen=True)
class Partition:
    """Disjoint cover of {0..N-1} by n nonempty coarse states.

    assignment[j] is the coarse index of fine state j.
    """

    assignment: np.ndarray
    n: int

    @property
    def fine_n(self):
        return self.assignment.shape[0]


@dataclass(frozen=True)
class CoarseModel:
    partition: Partition
    base: ProbabilityVector
    C: StochasticMatrix


def make_partition(assignment, n=None):
    """Build and validate a partition from an assignment vector."""
    assignment = np.asarray(assignment, dtype=int)
    if assignment.ndim != 1 or assignment.size == 0:
        raise PartitionError("make_partition: assignment must be a nonempty vector")
    if n is None:
        n = int(assignment.max()) + 1
    if assignment.min() < 0 or assignment.max() >= n:
        raise PartitionError("make_partition: coarse index out of range")
    counts = np.bincount(assignment, minlength=n)
    if np.any(counts == 0):
        empty = int(np.argmax(counts == 0))
        raise PartitionError(f"make_partition: coarse state {empty} is empty")
    return Partition(assignment=assignment, n=n)


def singleton_partition(N):
    """One coarse state per fine state."""
    return make_partition(np.arange(N), N)


def trivial_partition(N):
    """A single coarse state covering everything."""
    return make_partition(np.zeros(N, dtype=int), 1)


def aggregation_matrix(part):
    """The 0/1 aggregation operator as an n x N dense matrix."""
    A = np.zeros((part.n, part.fine_n))
    A[part.assignment, np.arange(part.fine_n)] = 1.0
    return A


def aggregate(nu, part):
    """Sum the mass of nu over each coarse state."""
    nu = np.asarray(nu, dtype=float)
    if nu.shape[0] != part.fine_n:
        raise PartitionError("aggregate: vector length does not match partition")
    return np.bincount(part.assignment, weights=nu, minlength=part.n)


def disaggregation_matrix(nu, part):
    """D(nu) as an N x n dense matrix; column i is nu conditioned on S_i."""
    nu = np.asarray(nu, dtype=float)
    anu = aggregate(nu, part)
    if np.any(anu <= 0):
        i = int(np.argmax(anu <= 0))
        raise ZeroMassStratumError(f"coarse state {i} has nonpositive mass")
    D = np.zeros((part.fine_n, part.n))
    D[np.arange(part.fine_n), part.assignment] = nu / anu[part.assignment]
    return D


def disaggregate(z, nu, part):
    """Spread coarse masses z over fine states proportionally to nu."""
    z = np.asarray(z, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if z.shape[0] != part.n:
        raise PartitionError("disaggregate: coarse vector length mismatch")
    anu = aggregate(nu, part)
    if np.any(anu <= 0):
        i = int(np.argmax(anu <= 0))
        raise ZeroMassStratumError(f"coarse state {i} has nonpositive mass")
    c = part.assignment
    return z[c] * nu / anu[c]


def coarse_matrix(P, nu, part):
    """The n x n coarse approximation C(nu) = A P D(nu)."""
    D = disaggregation_matrix(nu.probs, part)
    PD = P.mat @ D
    C = np.zeros((part.n, part.n))
    np.add.at(C, part.assignment, PD)
    return CoarseModel(partition=part, base=nu, C=validate(C))


def orthogonal_projection(nu, part):
    """Pi(nu) = D(nu) A, the l2(1/nu)-orthogonal projection on rg(D)."""
    nu_arr = np.asarray(nu.probs if isinstance(nu, ProbabilityVector) else nu,
                        dtype=float)
    if np.any(nu_arr <= 0):
        raise ValueError("orthogonal_projection: nu must be strictly positive")
    D = disaggregation_matrix(nu_arr, part)
    return D @ aggregation_matrix(part)


def coarse_projection(P, mu, nu, part):
    """The oblique projection S(nu) on rg(D(nu)) along the fine dynamics.

    S(nu) = D(nu) [A (I - P + mu 1^T) D(nu)]^{-1} A (I - P + mu 1^T).
    """
    nu_arr = nu.probs
    if np.any(nu_arr <= 0):
        raise ValueError("coarse_projection: nu must be strictly positive")
    N = P.n
    D = disaggregation_matrix(nu_arr, part)
    A = aggregation_matrix(part)
    B = A @ (np.eye(N) - P.mat + np.outer(mu.probs, np.ones(N)))
    inner = B @ D
    return D @ linalg.lu_solve(inner, B)


def is_refinement(refined, coarser):
    """True iff every stratum of `refined` lies inside one stratum of `coarser`."""
    if refined.fine_n != coarser.fine_n:
        return False
    for t in range(refined.n):
        labels = coarser.assignment[refined.assignment == t]
        if labels.size and np.any(labels != labels[0]):
            return False
    return True


def save_partition(path, part):
    """Write `fine_index coarse_index` lines, 0-based."""
    with open(path, "w") as fh:
        for j, c in enumerate(part.assignment):
            fh.write(f"{j} {int(c)}\n")


def load_partition(path):
    """Read a partition written by save_partition."""
    data = np.loadtxt(str(path), dtype=int, ndmin=2)
    if data.shape[1] != 2:
        raise PartitionError("load_partition: expected two columns per line")
    N = data.shape[0]
    assignment = np.full(N, -1, dtype=int)
    fine = data[:, 0]
    if np.any(fine < 0) or np.any(fine >= N) or len(np.unique(fine)) != N:
        raise PartitionError("load_partition: fine indices must cover 0..N-1 once")
    assignment[fine] = data[:, 1]
    return make_partition(assignment)
