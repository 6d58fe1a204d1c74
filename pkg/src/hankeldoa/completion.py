"""Hankel-structured matrix completion by factored ADMM.

Solves ``min ||H(g)||_*`` subject to ``g`` matching the observed elements,
using the factorization ``||X||_* = min (||U||_F^2 + ||V||_F^2) / 2`` over
``X = U V^H`` and the scaled augmented Lagrangian

    L(U, V, g, Lam) = ||U||_F^2 + ||V||_F^2 + rho * ||H(g) - U V^H + Lam||_F^2

minimized blockwise in the order U, V, g, followed by a multiplier step.
No SVD is needed inside the loop.
"""
from __future__ import annotations

import csv
import logging
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .array_model import SamplingMask, Snapshot
from .exceptions import DimensionError, UndefinedMetricError
from .hankel import HankelShape, dehankelize, hankelize

__all__ = [
    "AdmmConfig",
    "AdmmState",
    "CompletionResult",
    "complete",
    "nuclear_norm",
    "augmented_lagrangian",
    "nmse",
    "write_trace_csv",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdmmConfig:
    rho: float = 1e3
    factor_rank: Optional[int] = None
    max_iters: int = 2000
    primal_tol: float = 1e-7
    stall_tol: float = 1e-12
    fit_tol: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if self.factor_rank is not None and self.factor_rank < 1:
            raise ValueError("factor_rank must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not (self.primal_tol > 0 and self.stall_tol > 0 and self.fit_tol > 0):
            raise ValueError("tolerances must be positive")


@dataclass
class AdmmState:
    U: np.ndarray
    V: np.ndarray
    g: np.ndarray
    Lambda: np.ndarray
    iter: int = 0
    primal_residual_history: list = field(default_factory=list)
    objective_history: list = field(default_factory=list)


@dataclass(frozen=True)
class CompletionResult:
    y_hat: np.ndarray
    converged: bool
    iters_used: int
    final_residual: float
    nmse_vs_truth: Optional[float] = None
    factor_rank: int = 0
    state: Optional[AdmmState] = field(default=None, repr=False, compare=False)


def nuclear_norm(M) -> float:
    """Sum of singular values."""
    return float(np.sum(np.linalg.svd(np.asarray(M), compute_uv=False)))


def augmented_lagrangian(state: AdmmState, shape: HankelShape, rho: float) -> float:
    resid = hankelize(state.g, shape) - state.U @ state.V.conj().T + state.Lambda
    return float(np.linalg.norm(state.U) ** 2 + np.linalg.norm(state.V) ** 2
                 + rho * np.linalg.norm(resid) ** 2)


def _spectral_init(g0: np.ndarray, shape: HankelShape, R: int, seed: int):
    U, s, Vh = np.linalg.svd(hankelize(g0, shape), full_matrices=False)
    root = np.sqrt(s[:R])
    U, V = U[:, :R] * root, Vh[:R].conj().T * root
    # a zero column never leaves zero under the factor updates
    dead = root <= 1e-12 * max(root[0], np.finfo(float).tiny)
    if dead.any():
        rng = np.random.default_rng(seed)
        scale = 1e-3 * max(root[0], 1.0)
        for M in (U, V):
            k = M.shape[0]
            M[:, dead] = scale * (rng.standard_normal((k, dead.sum()))
                                  + 1j * rng.standard_normal((k, dead.sum()))) / np.sqrt(2 * k)
    return U, V


def _factor_update(target: np.ndarray, other: np.ndarray, rho: float) -> np.ndarray:
    # argmin_X ||X||^2 + rho ||target - X other^H||^2  =  rho target other (I + rho other^H other)^-1
    R = other.shape[1]
    gram = np.eye(R) + rho * (other.conj().T @ other)
    rhs = rho * (target @ other)
    return _herm_solve_right(rhs, gram)


def _herm_solve_right(B: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Solve ``X G = B`` for Hermitian positive definite ``G``."""
    L = np.linalg.cholesky(G)
    # X G = B  <=>  G^H X^H = B^H, and G^H = G
    Y = np.linalg.solve(L, B.conj().T)
    return np.linalg.solve(L.conj().T, Y).conj().T


def _admm(y_obs: np.ndarray, known: np.ndarray, shape: HankelShape, R: int,
          cfg: AdmmConfig, trace: bool, patience: Optional[float]) -> tuple:
    """Run the factored ADMM at factor width ``R``.

    With ``patience`` set, give up once the residual is above it and has
    failed to halve over the last 100 iterations (used by the rank search).
    """
    rho = cfg.rho
    g = y_obs.copy()
    U, V = _spectral_init(g, shape, R, cfg.seed)
    Lam = np.zeros(shape.matrix_shape, dtype=complex)
    state = AdmmState(U, V, g, Lam)
    missing = ~known
    hist = state.primal_residual_history
    converged = False
    resid = np.inf
    Hg = hankelize(g, shape)

    for it in range(1, cfg.max_iters + 1):
        T = Hg + Lam
        U = _factor_update(T, V, rho)
        V = _factor_update(T.conj().T, U, rho)
        X = U @ V.conj().T
        g_new = g.copy()
        g_new[missing] = dehankelize(X - Lam, shape)[missing]
        Hg = hankelize(g_new, shape)
        diff = Hg - X
        Lam = Lam + diff

        norm_hg = np.linalg.norm(Hg)
        resid = float(np.linalg.norm(diff) / norm_hg) if norm_hg > 0 else np.inf
        change = np.linalg.norm(g_new - g) / max(np.linalg.norm(g_new), np.finfo(float).tiny)
        g = g_new
        hist.append(resid)
        state.iter = it
        if trace:
            state.U, state.V, state.g, state.Lambda = U, V, g, Lam
            state.objective_history.append(augmented_lagrangian(state, shape, rho))
        if resid <= cfg.primal_tol:
            converged = True
            break
        if change <= cfg.stall_tol:
            break
        if patience is not None and it >= 200 and resid > patience and resid > 0.5 * hist[-101]:
            break

    state.U, state.V, state.g, state.Lambda = U, V, g, Lam
    return state, converged, resid


def complete(observed: Snapshot, shape: Optional[HankelShape] = None,
             cfg: Optional[AdmmConfig] = None, *, rank_estimate: Optional[int] = None,
             truth=None, trace: bool = False) -> CompletionResult:
    """Interpolate the unobserved elements of ``observed``.

    The factor width is ``cfg.factor_rank`` when set. Otherwise it is
    searched: starting from ``rank_estimate`` (or 1), the first width
    whose run reproduces the observations (final relative residual at or
    below ``cfg.fit_tol``) is kept. Widths are capped at ``(m - 1) // 2``,
    above which any data can be fit by some Hankel matrix of that rank.

    Parameters
    ----------
    observed : Snapshot
        Masked snapshot; entries in its mask are kept bit-for-bit.
    shape : HankelShape, optional
        Lifting geometry, the squarest one by default.
    cfg : AdmmConfig, optional
    rank_estimate : int, optional
        Where the width search starts.
    truth : array_like, optional
        Ground truth; fills ``nmse_vs_truth`` on the result.
    trace : bool
        Record the augmented Lagrangian after every iteration.
    """
    cfg = AdmmConfig() if cfg is None else cfg
    n = observed.n
    shape = HankelShape.square(n) if shape is None else shape
    if shape.n != n:
        raise DimensionError(f"shape is for n={shape.n}, snapshot has n={n}")
    mask = observed.mask if observed.mask is not None else SamplingMask.full(n)
    known = mask.boolean
    if not known.any():
        raise DimensionError("nothing observed")
    if not (known[0] and known[-1]):
        warnings.warn("array endpoints are unobserved; their values are pure extrapolation",
                      RuntimeWarning, stacklevel=2)

    y_obs = observed.values.copy()
    if known.all():
        return CompletionResult(y_hat=y_obs, converged=True, iters_used=0, final_residual=0.0,
                                factor_rank=0)

    if cfg.factor_rank is not None:
        R = min(cfg.factor_rank, shape.rank_budget)
        state, converged, resid = _admm(y_obs, known, shape, R, cfg, trace, None)
    else:
        cap = max(1, min((mask.m - 1) // 2, shape.rank_budget))
        start = min(max(1, rank_estimate or 1), cap)
        best = None
        for R in range(start, cap + 1):
            last = R == cap
            run = _admm(y_obs, known, shape, R, cfg, trace, None if last else 100 * cfg.fit_tol)
            log.debug("width %d: residual %.3g after %d iterations", R, run[2], run[0].iter)
            if best is None or run[2] < best[0][2]:
                best = (run, R)
            if run[2] <= cfg.fit_tol:
                best = (run, R)
                break
        (state, converged, resid), R = best

    err = None if truth is None else nmse(state.g, truth, mask)
    return CompletionResult(y_hat=state.g, converged=converged, iters_used=state.iter,
                            final_residual=float(resid), nmse_vs_truth=err,
                            factor_rank=R, state=state)


def nmse(estimate, truth, mask: SamplingMask) -> float:
    """Squared error on the unobserved elements, normalized by their energy."""
    estimate = np.asarray(estimate)
    truth = np.asarray(truth)
    if estimate.shape != truth.shape or truth.shape != (mask.n,):
        raise DimensionError("estimate, truth and mask must share length n")
    missing = ~mask.boolean
    if not missing.any():
        raise UndefinedMetricError("no unobserved elements to score")
    den = np.sum(np.abs(truth[missing]) ** 2)
    if den == 0:
        raise UndefinedMetricError("true signal has zero energy on the unobserved elements")
    return float(np.sum(np.abs(estimate[missing] - truth[missing]) ** 2) / den)


def write_trace_csv(state: AdmmState, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iter", "primal_residual", "objective"])
        obj = state.objective_history
        for i, res in enumerate(state.primal_residual_history, start=1):
            w.writerow([i, repr(res), repr(obj[i - 1]) if i <= len(obj) else ""])
