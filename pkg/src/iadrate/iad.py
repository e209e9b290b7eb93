"""Iterative aggregation/disaggregation solver.

One outer step is a coarse correction (solve the small aggregated chain,
spread its steady state over the fine states in the proportions of the
current iterate) followed by a single smoothing application of P. The
iteration stops when both the step change and the fine-level residual
drop below a relative tolerance.
"""

import numpy as np

from .chain import ProbabilityVector, steady_state
from .coarse import coarse_matrix, disaggregate
from .errors import NonConvergenceError

from dataclasses import dataclass, field


@dataclass(frozen=True)
class IadConfig:
    tau: float = 1e-9
    coarse_tau: float = 1e-9
    coarse_k: int = 2**15
    max_outer: int = 10000

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("IadConfig: tau must be positive")
        if not self.coarse_tau > 0:
            raise ValueError("IadConfig: coarse_tau must be positive")
        if self.coarse_k < 1:
            raise ValueError("IadConfig: coarse_k must be at least 1")
        if self.max_outer < 1:
            raise ValueError("IadConfig: max_outer must be at least 1")


@dataclass
class IadTrace:
    """History of one solve: the iterates mu^0, mu^1, ... plus the
    per-step change and residual maxima used by the stopping rule."""

    iterates: list = field(default_factory=list)
    rel_changes: list = field(default_factory=list)
    residuals: list = field(default_factory=list)


def coarse_steady_state(C, cfg=None):
    """Steady state of the (small) coarse matrix.

    Delegates to the lazy-matrix power solver; a reducible coarse matrix
    raises, which is how the known pathological aggregations surface.
    """
    if cfg is None:
        cfg = IadConfig()
    return steady_state(C, tol=cfg.coarse_tau, kpow=cfg.coarse_k)


def iad_step(P, part, mu_k, cfg=None):
    """One coarse correction plus one smoothing application of P."""
    if cfg is None:
        cfg = IadConfig()
    if np.any(mu_k.probs <= 0):
        raise ValueError("iad_step: iterate must be strictly positive")
    C = coarse_matrix(P, mu_k, part)
    z = coarse_steady_state(C.C, cfg)
    half = disaggregate(z.probs, mu_k.probs, part)
    out = P.mat @ half
    return ProbabilityVector(probs=out / out.sum())


def iad_solve(P, part, mu0, cfg=None):
    """Iterate iad_step from mu0 until both relative criteria fall
    below cfg.tau; returns (steady state estimate, trace).

    Raises NonConvergenceError carrying the trace when max_outer is
    exhausted, which some aggregation choices genuinely trigger.
    """
    if cfg is None:
        cfg = IadConfig()
    if np.any(mu0.probs <= 0):
        raise ValueError("iad_solve: mu0 must be strictly positive")
    trace = IadTrace(iterates=[mu0])
    mu_old = mu0
    for _ in range(cfg.max_outer):
        mu_new = iad_step(P, part, mu_old, cfg)
        change = np.max(np.abs(mu_new.probs - mu_old.probs) / mu_old.probs)
        smoothed = P.mat @ mu_new.probs
        resid = np.max(np.abs(smoothed - mu_new.probs) / smoothed)
        trace.iterates.append(mu_new)
        trace.rel_changes.append(float(change))
        trace.residuals.append(float(resid))
        if change <= cfg.tau and resid <= cfg.tau:
            return mu_new, trace
        mu_old = mu_new
    raise NonConvergenceError(
        f"iad_solve: no convergence in {cfg.max_outer} outer steps",
        trace=trace,
    )


def empirical_rate(trace, mu):
    """Observed asymptotic contraction factor of a solve.

    Fits a least-squares line to log of the weighted error
    ||mu^k - mu||_{1/mu} over the last half of the iterations whose
    error is still above 100x machine epsilon; returns exp(slope).
    """
    m = mu.probs
    errs = np.array(
        [np.sqrt(np.sum((it.probs - m) ** 2 / m)) for it in trace.iterates]
    )
    usable = errs > 100 * np.finfo(float).eps
    if np.count_nonzero(usable) < 8:
        raise ValueError("empirical_rate: need at least 8 usable iterates")
    idx = np.nonzero(usable)[0]
    tail = idx[len(idx) // 2 :]
    slope = np.polyfit(tail.astype(float), np.log(errs[tail]), 1)[0]
    return float(np.exp(slope))
