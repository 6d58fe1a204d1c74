"""scikit-learn style wrappers around the functional API.

Snapshots are rows of a complex array; unobserved elements are NaN.
"""
from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_n_elements, check_snapshots, missing_mask
from .array_model import SamplingMask, Snapshot, steering_matrix
from .completion import AdmmConfig, complete
from .doa import AMPLITUDE_FLOOR, estimate_doa
from .hankel import HankelShape
from .leverage import leverage_scores, select_elements

__all__ = ["LeverageSampler", "HankelCompleter", "SpectralDoaEstimator"]


def _as_snapshot(row: np.ndarray) -> Snapshot:
    known = ~missing_mask(row)
    values = np.where(known, row, 0)
    if known.all():
        return Snapshot(values)
    return Snapshot(values, SamplingMask.from_boolean(known))


class LeverageSampler(TransformerMixin, BaseEstimator):
    """Pick ``m`` array elements from the leverage scores of one snapshot.

    Parameters
    ----------
    m : int
        Number of elements to activate.
    mode : {"top-m", "probabilistic"}
    rank : int or None
        Signal order. ``None`` estimates it: by thresholding for a full
        snapshot, by the completion width search for a partial one.
    random_state : int
        Seed for the probabilistic mode.

    Attributes
    ----------
    scores_ : ndarray of shape (n,)
    rank_ : int
    support_ : ndarray of bool, shape (n,)
    """

    def __init__(self, m=10, mode="top-m", rank=None, random_state=0):
        self.m = m
        self.mode = mode
        self.rank = rank
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_snapshots(X)
        if X.shape[0] != 1:
            raise ValueError("LeverageSampler is fitted on a single snapshot")
        snap = _as_snapshot(X[0])
        shape = HankelShape.square(snap.n)
        rank = self.rank
        if rank is None and not snap.is_full:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                rank = complete(snap, shape).factor_rank
        scores = leverage_scores(snap, shape, rank=rank)
        plan = select_elements(scores, self.m, self.mode, seed=self.random_state)
        self.scores_ = scores.mu
        self.rank_ = scores.rank_used
        self.support_ = plan.mask.boolean
        self.n_features_in_ = snap.n
        return self

    def get_support(self, indices=False):
        check_is_fitted(self, "support_")
        return np.flatnonzero(self.support_) + 1 if indices else self.support_.copy()

    def transform(self, X):
        """Blank (NaN) every element outside the selection."""
        check_is_fitted(self, "support_")
        X = check_snapshots(X)
        check_n_elements(self, X)
        out = X.copy()
        out[:, ~self.support_] = np.nan
        return out


class HankelCompleter(TransformerMixin, BaseEstimator):
    """Fill missing ULA elements by low-rank Hankel completion.

    Stateless: ``fit`` only records the array size. Parameters mirror
    :class:`~hankeldoa.completion.AdmmConfig`; ``rank_estimate`` seeds the
    width search when ``factor_rank`` is None.
    """

    def __init__(self, rho=1e3, factor_rank=None, rank_estimate=None, max_iters=2000,
                 primal_tol=1e-7, fit_tol=1e-4):
        self.rho = rho
        self.factor_rank = factor_rank
        self.rank_estimate = rank_estimate
        self.max_iters = max_iters
        self.primal_tol = primal_tol
        self.fit_tol = fit_tol

    def fit(self, X, y=None):
        X = check_snapshots(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_snapshots(X)
        check_n_elements(self, X)
        cfg = AdmmConfig(rho=self.rho, factor_rank=self.factor_rank, max_iters=self.max_iters,
                         primal_tol=self.primal_tol, fit_tol=self.fit_tol)
        out = np.empty_like(X)
        self.results_ = []
        for i, row in enumerate(X):
            res = complete(_as_snapshot(row), cfg=cfg, rank_estimate=self.rank_estimate)
            out[i] = res.y_hat
            self.results_.append(res)
        return out


class SpectralDoaEstimator(BaseEstimator):
    """Source frequencies and amplitudes of one full snapshot.

    ``n_sources=None`` takes the numerical order of the snapshot's Hankel
    matrix (relative threshold ``rank_tol``).
    """

    def __init__(self, n_sources=None, method="matrix-pencil", amplitude_floor=AMPLITUDE_FLOOR,
                 rank_tol=1e-6):
        self.n_sources = n_sources
        self.method = method
        self.amplitude_floor = amplitude_floor
        self.rank_tol = rank_tol

    def fit(self, X, y=None):
        X = check_snapshots(X, allow_missing=False)
        if X.shape[0] != 1:
            raise ValueError("SpectralDoaEstimator is fitted on a single snapshot")
        y_full = X[0]
        r = self.n_sources
        if r is None:
            r = leverage_scores(Snapshot(y_full), rank_tolerance=self.rank_tol).rank_used
            r = max(1, min(r, (y_full.size - 1) // 2))
        est = estimate_doa(y_full, r, self.method, self.amplitude_floor)
        self.estimate_ = est
        self.taus_ = est.taus
        self.amplitudes_ = est.amplitudes
        self.n_features_in_ = y_full.size
        return self

    def predict(self, indices):
        """Model response at 1-based element ``indices`` (may exceed ``n``)."""
        check_is_fitted(self, "taus_")
        k = np.atleast_1d(np.asarray(indices, dtype=int))
        A = np.exp(-2j * np.pi * np.outer(k, self.taus_))
        return A @ self.amplitudes_

    def angles_degrees(self, wavelength_ratio=0.5):
        check_is_fitted(self, "taus_")
        return self.estimate_.angles_degrees(wavelength_ratio)

    def score(self, X, y=None):
        """Negative relative residual of the fitted model on full snapshot ``X``."""
        X = check_snapshots(X, allow_missing=False)
        check_n_elements(self, X)
        model = steering_matrix(self.taus_, X.shape[1]) @ self.amplitudes_
        return -float(np.linalg.norm(X - model) / np.linalg.norm(X))
