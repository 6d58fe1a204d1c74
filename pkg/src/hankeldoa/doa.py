"""Frequency/direction extraction from a full ULA vector.

Two subspace back-ends share the same root-to-frequency map. For
``y[k] = sum_l b_l z_l**k`` with ``z_l = exp(-2j*pi*tau_l)``, a recovered
root ``z`` gives ``tau = -angle(z) / (2*pi)`` wrapped to ``[-1/2, 1/2)``.
"""
from __future__ import annotations

import json
import csv
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .array_model import SourceScene
from .exceptions import DimensionError

__all__ = [
    "DoaEstimate",
    "DetectionReport",
    "estimate_doa",
    "fit_amplitudes",
    "match_detections",
    "write_estimate_csv",
    "write_report_json",
]

#: fitted amplitudes below this fraction of the largest are treated as spurious
AMPLITUDE_FLOOR = 1e-3
#: roots farther than this from the unit circle are flagged
UNIT_CIRCLE_SLACK = 0.2


@dataclass(frozen=True)
class DoaEstimate:
    taus: np.ndarray
    amplitudes: np.ndarray
    method: str
    root_moduli: np.ndarray = field(default=None, repr=False)
    off_circle: np.ndarray = field(default=None, repr=False)
    discarded_taus: np.ndarray = field(default=None, repr=False)
    discarded_amplitudes: np.ndarray = field(default=None, repr=False)

    @property
    def r(self) -> int:
        return self.taus.size

    def angles_degrees(self, wavelength_ratio: float = 0.5) -> np.ndarray:
        s = np.clip(self.taus / wavelength_ratio, -1.0, 1.0)
        return np.degrees(np.arcsin(s))


@dataclass(frozen=True)
class DetectionReport:
    matches: list  # (true_index, estimate_index, sin_error), 0-based
    missed: list
    false_positives: list
    threshold: float

    @property
    def all_detected(self) -> bool:
        return not self.missed

    @property
    def n_detected(self) -> int:
        return len(self.matches)

    def to_dict(self) -> dict:
        return {
            "matches": [
                {"true_index": t, "estimate_index": e, "sin_error": err}
                for t, e, err in self.matches
            ],
            "missed": list(self.missed),
            "false_positives": list(self.false_positives),
            "all_detected": self.all_detected,
            "threshold": self.threshold,
        }


def _wrap_tau(tau):
    return (np.asarray(tau) + 0.5) % 1.0 - 0.5


def _prony_roots(y: np.ndarray, r: int) -> np.ndarray:
    n = y.size
    # y[k + r] + sum_i a_i y[k + r - i] = 0, least squares over all n - r equations
    A = scipy.linalg.hankel(y[: n - r], y[n - r - 1 : n - 1])[:, ::-1]
    rhs = -y[r:]
    coef, _, rank, _ = scipy.linalg.lstsq(A, rhs)
    if rank < r:
        warnings.warn(f"prediction system has rank {rank} < {r}", RuntimeWarning, stacklevel=3)
    return np.roots(np.concatenate(([1.0], coef)))


def _pencil_roots(y: np.ndarray, r: int) -> np.ndarray:
    n = y.size
    L = n // 2
    Y = scipy.linalg.hankel(y[: n - L], y[n - L - 1 :])  # (n-L) x (L+1)
    _, _, Vh = np.linalg.svd(Y, full_matrices=False)
    Vr = Vh[:r].T  # spans the Vandermonde columns z**j, (L+1) x r
    V0, V1 = Vr[:-1], Vr[1:]
    # shift invariance: V1 = V0 Z  ->  eig(pinv(V0) V1)
    return np.linalg.eigvals(np.linalg.pinv(V0) @ V1)


def fit_amplitudes(y: np.ndarray, taus: np.ndarray) -> np.ndarray:
    """Least-squares amplitudes on the Vandermonde system ``y ~ A(taus) b``."""
    k = np.arange(1, y.size + 1)
    A = np.exp(-2j * np.pi * np.outer(k, taus))
    return scipy.linalg.lstsq(A, y)[0]


def _numerical_rank(y: np.ndarray, r: int, tol: float) -> int:
    n = y.size
    L = n // 2
    s = np.linalg.svd(scipy.linalg.hankel(y[: n - L], y[n - L - 1 :]), compute_uv=False)
    if s[0] == 0:
        return 0
    return int(min(r, np.count_nonzero(s > tol * s[0])))


def estimate_doa(y, r: int, method: str = "matrix-pencil",
                 amplitude_floor: float = AMPLITUDE_FLOOR,
                 rank_tol: float = 1e-12) -> DoaEstimate:
    """Estimate ``r`` frequencies and amplitudes from a full ULA vector.

    Parameters
    ----------
    y : array_like
        Full length-``n`` snapshot, ``n >= 2r + 1``.
    r : int
        Model order. Roots whose fitted amplitude is below
        ``amplitude_floor * max|b|`` are moved to ``discarded_*``, so an
        overestimated order is harmless on clean data.
    method : {"matrix-pencil", "prony"}
    """
    y = np.asarray(y, dtype=complex)
    if y.ndim != 1:
        raise DimensionError("y must be a vector")
    if r < 1:
        raise ValueError("need r >= 1")
    if y.size < 2 * r + 1:
        raise DimensionError(f"n={y.size} is too short for r={r} (need 2r+1)")
    r_eff = _numerical_rank(y, r, rank_tol)
    if r_eff == 0:
        raise DimensionError("all-zero input")
    if r_eff < r:
        warnings.warn(f"data support only {r_eff} of the {r} requested components",
                      RuntimeWarning, stacklevel=2)

    if method == "prony":
        roots = _prony_roots(y, r_eff)
    elif method == "matrix-pencil":
        roots = _pencil_roots(y, r_eff)
    else:
        raise ValueError(f"unknown method {method!r}")

    moduli = np.abs(roots)
    taus = _wrap_tau(-np.angle(roots) / (2 * np.pi))
    amps = fit_amplitudes(y, taus)
    keep = np.abs(amps) >= amplitude_floor * np.max(np.abs(amps))
    # coincident roots cannot be told apart; keep the first of each
    order = np.argsort(taus)
    taus, amps, moduli, keep = taus[order], amps[order], moduli[order], keep[order]
    dup = np.concatenate(([False], np.diff(taus) == 0))
    keep &= ~dup
    if keep.sum() < taus.size and keep.any():
        amps_kept = fit_amplitudes(y, taus[keep])
    else:
        amps_kept = amps[keep]
    return DoaEstimate(
        taus=taus[keep],
        amplitudes=amps_kept,
        method=method,
        root_moduli=moduli[keep],
        off_circle=np.abs(moduli[keep] - 1) > UNIT_CIRCLE_SLACK,
        discarded_taus=taus[~keep],
        discarded_amplitudes=amps[~keep],
    )


def match_detections(truth: SourceScene, est: DoaEstimate,
                     threshold: float = 0.005) -> DetectionReport:
    """Greedily pair true and estimated sources by sine-domain error.

    The error of a pair is ``|sin(theta) - sin(theta_hat)|``, i.e.
    ``|tau - tau_hat| / wavelength_ratio``. Pairs are taken in ascending
    error (ties by true index, then estimate index) while both members
    are unmatched and the error is within ``threshold``.
    """
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    t = np.asarray(truth.taus)
    e = np.asarray(est.taus)
    err = np.abs(t[:, None] - e[None, :]) / truth.wavelength_ratio
    ti, ei = np.nonzero(err <= threshold)
    cand = sorted(zip(err[ti, ei], ti, ei))
    used_t, used_e, matches = set(), set(), []
    for d, i, j in cand:
        if i in used_t or j in used_e:
            continue
        used_t.add(i)
        used_e.add(j)
        matches.append((int(i), int(j), float(d)))
    matches.sort()
    missed = [i for i in range(t.size) if i not in used_t]
    false_pos = [j for j in range(e.size) if j not in used_e]
    return DetectionReport(matches, missed, false_pos, threshold)


def write_estimate_csv(est: DoaEstimate, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["tau_hat", "amp_re", "amp_im"])
        for tau, b in zip(est.taus, est.amplitudes):
            w.writerow([repr(float(tau)), repr(float(b.real)), repr(float(b.imag))])


def write_report_json(report: DetectionReport, path) -> None:
    with open(path, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
