"""Leverage scores of Hankel-lifted snapshots and element selection.

Each array element ``k`` owns the normalized basis matrix
``A_k = H(e_k) / sqrt(c_k)``. Its score is

    mu_k = (n / r) * max(||U^H A_k||_F^2, ||A_k V||_F^2)

with ``U, V`` the rank-``r`` singular subspaces of ``H(y)``. Because
``A_k`` is a scaled indicator of one anti-diagonal, both norms reduce to
anti-diagonal averages of the squared row norms of ``U`` and ``V``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .array_model import SamplingMask, Snapshot
from .exceptions import DegenerateInputError, InfeasiblePlanError
from .hankel import HankelShape, dehankelize, hankelize

__all__ = [
    "EXACT_RANK_TOL",
    "PARTIAL_RANK_TOL",
    "LeverageScores",
    "SamplingPlan",
    "numerical_rank",
    "leverage_scores",
    "select_elements",
    "sampling_probability_bound",
    "edge_energy_condition",
    "write_scores_csv",
    "write_plan_csv",
]

EXACT_RANK_TOL = 1e-8
PARTIAL_RANK_TOL = 1e-2


@dataclass(frozen=True)
class LeverageScores:
    mu: np.ndarray
    rank_used: int
    source: str  # "exact" or "approximate"
    U: Optional[np.ndarray] = None
    V: Optional[np.ndarray] = None
    singular_values: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.mu.size


@dataclass(frozen=True)
class SamplingPlan:
    mask: SamplingMask
    mode: str
    forced: tuple


def numerical_rank(s: np.ndarray, tol: float) -> int:
    """Count singular values above ``tol * s[0]``."""
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def _singular_subspaces(y: np.ndarray, shape: HankelShape, tol: float):
    H = hankelize(y, shape)
    U, s, Vh = np.linalg.svd(H, full_matrices=False)
    r = numerical_rank(s, tol)
    return U[:, :r], Vh[:r].conj().T, s, r


def leverage_scores(y: Snapshot, shape: Optional[HankelShape] = None,
                    rank_tolerance: Optional[float] = None,
                    rank: Optional[int] = None) -> LeverageScores:
    """Hankel leverage scores of a full or zero-filled partial snapshot.

    Parameters
    ----------
    y : Snapshot
        Full snapshot (exact scores) or a masked one, whose zero-filled
        Hankel matrix yields approximate scores.
    shape : HankelShape, optional
        Defaults to the squarest lifting.
    rank_tolerance : float, optional
        Relative singular-value threshold for the rank. Defaults to
        ``EXACT_RANK_TOL`` for full snapshots, ``PARTIAL_RANK_TOL`` otherwise.
    rank : int, optional
        Use this rank instead of thresholding.
    """
    shape = HankelShape.square(y.n) if shape is None else shape
    if not np.any(y.values):
        raise DegenerateInputError("cannot score an all-zero snapshot")
    if rank_tolerance is None:
        rank_tolerance = EXACT_RANK_TOL if y.is_full else PARTIAL_RANK_TOL
    U, V, s, r = _singular_subspaces(y.values, shape, rank_tolerance)
    if rank is not None:
        H = hankelize(y.values, shape)
        Uf, s, Vh = np.linalg.svd(H, full_matrices=False)
        r = int(min(max(rank, 1), s.size))
        U, V = Uf[:, :r], Vh[:r].conj().T
    u2 = np.sum(np.abs(U) ** 2, axis=1)
    v2 = np.sum(np.abs(V) ** 2, axis=1)
    left = dehankelize(np.broadcast_to(u2[:, None], shape.matrix_shape), shape)
    right = dehankelize(np.broadcast_to(v2[None, :], shape.matrix_shape), shape)
    mu = (shape.n / r) * np.maximum(left, right)
    return LeverageScores(mu=mu, rank_used=r, source="exact" if y.is_full else "approximate",
                          U=U, V=V, singular_values=s)


def select_elements(scores: LeverageScores, m: int, mode: str = "top-m",
                    seed: int = 0, forced: Optional[tuple] = None) -> SamplingPlan:
    """Choose the active elements for the next snapshot.

    ``top-m`` keeps the ``m`` highest scores (ties to the lower index);
    ``probabilistic`` includes element ``k`` with probability
    ``min(1, m * mu_k / sum(mu))``. The forced elements (default: both
    array ends) are always included; in ``top-m`` mode they displace the
    lowest-scored picks so that exactly ``m`` elements stay active.
    """
    n = scores.n
    forced = (1, n) if forced is None else tuple(sorted(set(int(k) for k in forced)))
    need = max(4, 2 * scores.rank_used)
    if m > n:
        raise InfeasiblePlanError(f"m={m} exceeds the array size n={n}")
    if m < need:
        raise InfeasiblePlanError(
            f"m={m} is below max(4, 2*rank)={need}; completion cannot succeed"
        )
    if len(forced) > m:
        raise InfeasiblePlanError(f"{len(forced)} forced elements exceed m={m}")
    forced_idx = np.asarray(forced, dtype=int) - 1
    mu = np.asarray(scores.mu, dtype=float)

    if mode == "top-m":
        order = np.lexsort((np.arange(n), -mu))
        rest = [k for k in order if k not in set(forced_idx)]
        chosen = np.concatenate([forced_idx, rest[: m - len(forced_idx)]]).astype(int)
        selected = np.zeros(n, dtype=bool)
        selected[chosen] = True
        return SamplingPlan(SamplingMask.from_boolean(selected), mode, forced)

    if mode == "probabilistic":
        total = mu.sum()
        p = np.full(n, m / n) if total <= 0 else np.minimum(1.0, m * mu / total)
        rng = np.random.default_rng(seed)
        selected = rng.random(n) < p
        selected[forced_idx] = True
        return SamplingPlan(SamplingMask.from_boolean(selected, p), mode, forced)

    raise ValueError(f"unknown selection mode {mode!r}")


def sampling_probability_bound(scores: LeverageScores, c: float = 1.0) -> np.ndarray:
    """Per-element sufficient sampling probability for exact recovery.

    ``min(1, max(c * mu_k * r**2 * ln(n)**3, 1) / n)``; the constant
    ``c`` is unknown, so this is a diagnostic only.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    n, r = scores.n, scores.rank_used
    raw = c * scores.mu * r**2 * np.log(n) ** 3
    return np.minimum(1.0, np.maximum(raw, 1.0) / n)


def edge_energy_condition(y: Snapshot, shape: Optional[HankelShape] = None,
                          rank_tolerance: float = EXACT_RANK_TOL):
    """Energy of the signal subspaces at the Hankel corners.

    Returns ``(||U U^H e_1||^2, ||e_last^T V V^H||^2, holds)`` where
    ``holds`` tests ``1 / (8 ln n) <= min`` of the two.
    """
    shape = HankelShape.square(y.n) if shape is None else shape
    if not np.any(y.values):
        raise DegenerateInputError("cannot analyse an all-zero snapshot")
    U, V, _, _ = _singular_subspaces(y.values, shape, rank_tolerance)
    # ||P e_1||^2 = e_1^H P e_1 = squared norm of the first row of U
    first = float(np.sum(np.abs(U[0]) ** 2))
    last = float(np.sum(np.abs(V[-1]) ** 2))
    return first, last, bool(1.0 / (8.0 * np.log(shape.n)) <= min(first, last))


def write_scores_csv(scores: LeverageScores, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "mu"])
        for k, v in enumerate(scores.mu, start=1):
            w.writerow([k, repr(float(v))])


def write_plan_csv(plan: SamplingPlan, path) -> None:
    selected = plan.mask.boolean
    forced = set(plan.forced)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "selected", "forced"])
        for k in range(1, plan.mask.n + 1):
            w.writerow([k, int(selected[k - 1]), int(k in forced)])
