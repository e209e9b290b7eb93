"""Model chains on 1D and 2D periodic grids with discrete Boltzmann
steady states, irreversible shift mixtures, the partition families used
in the experiments, and small pathological fixtures.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .chain import ProbabilityVector, StochasticMatrix, validate
from .coarse import Partition, make_partition, singleton_partition, trivial_partition
from .errors import PartitionError


def double_well_potential(x):
    """Tilted double well (1 - x^2)^2 + x/2 used by the 1D experiments."""
    return (1.0 - x**2) ** 2 + 0.5 * x


def two_dim_potential(x, y, park_variant=False, quartic=True):
    """Sum-of-Gaussians surface with two deep wells and a shallow one,
    confined by quartic walls.

    park_variant=False keeps the (y^2 - 5/3)^2 exponent in the second term;
    True replaces it with (y - 5/3)^2. quartic=False drops the confinement
    terms. The defaults are the combination that reproduces the reference
    eigenvalues of the 2D experiment (see README).
    """
    t2 = (y - 5.0 / 3.0) ** 2 if park_variant else (y**2 - 5.0 / 3.0) ** 2
    v = (
        3.0 * np.exp(-(x**2) - (y - 1.0 / 3.0) ** 2)
        - 3.0 * np.exp(-(x**2) - t2)
        - 5.0 * np.exp(-((x - 1.0) ** 2) - y**2)
        - 5.0 * np.exp(-((x + 1.0) ** 2) - y**2)
    )
    if quartic:
        v = v + 0.2 * x**4 + 0.2 * (y - 1.0 / 3.0) ** 4
    return v


@dataclass(frozen=True)
class Chain1DSpec:
    potential: Callable[[np.ndarray], np.ndarray]
    a: float
    b: float
    N: int
    T: float

    def __post_init__(self):
        if not (self.a < self.b and self.N >= 3 and self.T > 0):
            raise ValueError("Chain1DSpec: require a < b, N >= 3, T > 0")


@dataclass(frozen=True)
class Chain2DSpec:
    potential: Callable[[np.ndarray, np.ndarray], np.ndarray]
    a: float
    b: float
    c: float
    d: float
    N: int
    T: float
    move_set: str = "axis_aligned"  # "axis_aligned" or "diagonal"

    def __post_init__(self):
        if not (self.a < self.b and self.c < self.d and self.N >= 3 and self.T > 0):
            raise ValueError("Chain2DSpec: require a < b, c < d, N >= 3, T > 0")
        if self.move_set not in ("diagonal", "axis_aligned"):
            raise ValueError(f"Chain2DSpec: unknown move_set {self.move_set!r}")


@dataclass(frozen=True)
class MixSpec:
    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("MixSpec: alpha must lie in [0, 1]")


def benchmark_chain_1d_spec():
    """Parameters of the standard 1D experiment."""
    return Chain1DSpec(potential=double_well_potential, a=-1.7, b=1.55, N=100, T=0.1)


def benchmark_chain_2d_spec(move_set="axis_aligned", park_variant=False):
    """Parameters of the standard 2D experiment."""
    pot = lambda x, y: two_dim_potential(x, y, park_variant=park_variant)
    return Chain2DSpec(potential=pot, a=-1.7, b=1.7, c=-1.7, d=2.0, N=50, T=0.25,
                       move_set=move_set)


def boltzmann_1d(spec):
    """Discrete Boltzmann distribution on the endpoint-inclusive grid
    x_i = a + (b - a) i / (N - 1), i = 0..N-1."""
    x = np.linspace(spec.a, spec.b, spec.N)
    v = np.asarray(spec.potential(x), dtype=float)
    e = np.exp(-(v - v.min()) / spec.T)
    return ProbabilityVector(probs=e / e.sum())


def reversible_chain_1d(mu):
    """Nearest-neighbor Metropolis-like chain in detailed balance with mu.

    Periodic wraparound; off-diagonals are half the target's share of the
    pairwise mass, the diagonal takes the rest.
    """
    m = mu.probs
    N = m.shape[0]
    if np.any(m <= 0):
        raise ValueError("reversible_chain_1d: mu must be strictly positive")
    up = 0.5 * np.roll(m, -1) / (np.roll(m, -1) + m)    # i -> i+1
    down = 0.5 * np.roll(m, 1) / (np.roll(m, 1) + m)    # i -> i-1
    P = np.zeros((N, N))
    idx = np.arange(N)
    np.add.at(P, ((idx + 1) % N, idx), up)
    np.add.at(P, ((idx - 1) % N, idx), down)
    P[idx, idx] += 1.0 - up - down
    return StochasticMatrix(mat=P)


def right_shift(N):
    """Cyclic permutation matrix sending state i to i+1."""
    if N < 2:
        raise ValueError("right_shift: N must be at least 2")
    W = np.zeros((N, N))
    idx = np.arange(N)
    W[(idx + 1) % N, idx] = 1.0
    return StochasticMatrix(mat=W)


def left_shift(N):
    """Cyclic permutation matrix sending state i to i-1. This is the
    non-reversible perturbation used in the shift-mixture experiments."""
    if N < 2:
        raise ValueError("left_shift: N must be at least 2")
    W = np.zeros((N, N))
    idx = np.arange(N)
    W[(idx - 1) % N, idx] = 1.0
    return StochasticMatrix(mat=W)


def mix(P, W, alpha):
    """Convex combination (1 - alpha) P + alpha W."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("mix: alpha must lie in [0, 1]")
    if P.mat.shape != W.mat.shape:
        raise ValueError("mix: dimension mismatch")
    return StochasticMatrix(mat=(1.0 - alpha) * P.mat + alpha * W.mat)


def boltzmann_2d(spec):
    """Discrete Boltzmann distribution on the N x N grid, flattened row-major."""
    x = np.linspace(spec.a, spec.b, spec.N)
    y = np.linspace(spec.c, spec.d, spec.N)
    v = np.asarray(spec.potential(x[:, None], y[None, :]), dtype=float)
    e = np.exp(-(v - v.min()) / spec.T)
    return ProbabilityVector(probs=(e / e.sum()).reshape(-1))


_MOVES = {
    "diagonal": ((1, 1), (1, -1), (-1, 1), (-1, -1)),
    "axis_aligned": ((1, 0), (-1, 0), (0, 1), (0, -1)),
}


def reversible_chain_2d(mu, spec):
    """Metropolis-like chain on the periodic N x N grid in detailed balance
    with mu; each of the four moves in the move set gets weight
    mu(target) / (4 (mu(target) + mu(source)))."""
    N = spec.N
    m = mu.probs.reshape(N, N)
    if np.any(m <= 0):
        raise ValueError("reversible_chain_2d: mu must be strictly positive")
    P = np.zeros((N * N, N * N))
    ii, jj = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    src = (ii * N + jj).reshape(-1)
    for dk, dl in _MOVES[spec.move_set]:
        ti = (ii + dk) % N
        tj = (jj + dl) % N
        tgt = (ti * N + tj).reshape(-1)
        w = (0.25 * m[ti, tj] / (m[ti, tj] + m)).reshape(-1)
        P[tgt, src] += w
    P[src, src] += 1.0 - P.sum(axis=0)
    return StochasticMatrix(mat=P)


def uniform1d(N, n, ell):
    """n contiguous strata of ~N/n states each, cyclically shifted by ell;
    the last stratum wraps around the origin."""
    if n < 1 or n > N:
        raise PartitionError(f"uniform1d: need 1 <= n <= N, got n={n}")
    if ell < 0 or ell > N // n:
        raise PartitionError(f"uniform1d: need 0 <= ell <= N//n, got ell={ell}")
    assignment = np.full(N, n - 1, dtype=int)
    for J in range(n - 1):
        lo = J * N // n + ell
        hi = (J + 1) * N // n + ell
        assignment[lo:hi] = J
    return make_partition(assignment, n)


def split1d(N, ell):
    """Two strata {0..ell} and {ell+1..N-1}."""
    if not 0 <= ell <= N - 2:
        raise PartitionError(f"split1d: need 0 <= ell <= N-2, got ell={ell}")
    assignment = np.zeros(N, dtype=int)
    assignment[ell + 1:] = 1
    return make_partition(assignment, 2)


def _axis_strata(N, s):
    """Axis index -> stratum label for s near-equal contiguous stripes.

    The base size is N // s; the N mod s leftover states widen the
    strata closest to the two ends of the axis, outermost first. For
    N=50 this yields sizes (17, 16, 17) at s=3 and (9, 8, 8, 8, 8, 9)
    at s=6, the layout the reference rate tables were computed with.
    """
    if not 1 <= s <= N:
        raise PartitionError(f"need 1 <= s <= N, got s={s}, N={N}")
    sizes = np.full(s, N // s, dtype=int)
    order = np.argsort(np.minimum(np.arange(s), s - 1 - np.arange(s)),
                       kind="stable")
    sizes[order[: N % s]] += 1
    return np.repeat(np.arange(s), sizes)


def stripes2d(N, s):
    """s stripes in the first grid coordinate of the flattened N x N grid."""
    return make_partition(np.repeat(_axis_strata(N, s), N), s)


def grid2d(N, s):
    """s x s blocks of the flattened N x N grid."""
    a = _axis_strata(N, s)
    ii = np.repeat(a, N)
    jj = np.tile(a, N)
    return make_partition(ii * s + jj, s * s)


def partition_families(kind, **params):
    """Dispatch to the named partition constructor."""
    table = {"uniform1d": uniform1d, "split1d": split1d,
             "stripes2d": stripes2d, "grid2d": grid2d,
             "singleton": singleton_partition, "trivial": trivial_partition}
    if kind not in table:
        raise PartitionError(f"partition_families: unknown kind {kind!r}")
    return table[kind](**params)


def pathological_fixtures():
    """Small chains on which IAD is known to misbehave.

    reducible_coarse: irreducible aperiodic 3-state chain whose coarse
        matrix at the given (non-positive) initial vector is reducible.
    marek: irreducible aperiodic 4-state chain with P^T P reducible.
    periodic_shift: the 3-state cyclic shift.
    """
    fixtures = {}

    P1 = validate(np.array([
        [0.0, 1 / 3, 0.0],
        [1.0, 1 / 3, 1.0],
        [0.0, 1 / 3, 0.0],
    ]))
    part1 = make_partition(np.array([0, 0, 1]), 2)
    mu01 = ProbabilityVector(probs=np.array([0.5, 0.0, 0.5]))
    fixtures["reducible_coarse"] = (P1, part1, mu01)

    P2 = validate(np.array([
        [0.0, 1.0, 0.0, 0.5],
        [0.5, 0.0, 0.0, 0.0],
        [0.5, 0.0, 0.0, 0.5],
        [0.0, 0.0, 1.0, 0.0],
    ]))
    part2 = make_partition(np.array([0, 0, 1, 1]), 2)
    # a generic (asymmetric) start; the exactly uniform vector lands on a
    # symmetry of this chain and converges despite rho(J) = 1
    mu02 = ProbabilityVector(probs=np.array([0.4, 0.1, 0.3, 0.2]))
    fixtures["marek"] = (P2, part2, mu02)

    P3 = right_shift(3)
    part3 = make_partition(np.array([0, 0, 1]), 2)
    mu03 = ProbabilityVector(probs=np.full(3, 1 / 3))
    fixtures["periodic_shift"] = (P3, part3, mu03)

    return fixtures


def load_config(path):
    """Parse a flat key=value model config file into a dict.

    Recognized keys: model, N, T, a, b, c, d, alpha, move_set,
    park_variant, partition.kind, partition.n, partition.ell, partition.s.
    """
    cfg = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"load_config: bad line {raw!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            cfg[key] = val
    return cfg


def build_model(cfg):
    """Instantiate (P, mu_or_None, partition_or_None) from a config dict.

    mu is returned only when it is analytically known (reversible
    Boltzmann chains with alpha = 0).
    """
    kind = cfg.get("model", "chain1d")
    alpha = float(cfg.get("alpha", 0.0))
    fixtures = pathological_fixtures()
    if kind in fixtures:
        P, part, _ = fixtures[kind]
        return P, None, part
    if kind == "chain1d":
        spec = Chain1DSpec(
            potential=double_well_potential,
            a=float(cfg.get("a", -1.7)), b=float(cfg.get("b", 1.55)),
            N=int(cfg.get("N", 100)), T=float(cfg.get("T", 0.1)))
        mu = boltzmann_1d(spec)
        P = reversible_chain_1d(mu)
    elif kind == "chain2d":
        park = cfg.get("park_variant", "0") in ("1", "true", "yes")
        pot = lambda x, y: two_dim_potential(x, y, park_variant=park)
        spec = Chain2DSpec(
            potential=pot,
            a=float(cfg.get("a", -1.7)), b=float(cfg.get("b", 1.7)),
            c=float(cfg.get("c", -1.7)), d=float(cfg.get("d", 2.0)),
            N=int(cfg.get("N", 50)), T=float(cfg.get("T", 0.25)),
            move_set=cfg.get("move_set", "axis_aligned"))
        mu = boltzmann_2d(spec)
        P = reversible_chain_2d(mu, spec)
    else:
        raise ValueError(f"build_model: unknown model {kind!r}")
    if alpha > 0.0:
        P = mix(P, left_shift(P.n), alpha)
        mu = None
    part = None
    if "partition.kind" in cfg:
        pkind = cfg["partition.kind"]
        params = {"N": P.n if kind == "chain1d" else int(cfg.get("N", 50))}
        for key, name in (("partition.n", "n"), ("partition.ell", "ell"),
                          ("partition.s", "s")):
            if key in cfg:
                params[name] = int(cfg[key])
        part = partition_families(pkind, **params)
    return P, mu, part
