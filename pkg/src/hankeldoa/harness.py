"""Two-snapshot pipeline and Monte Carlo campaigns.

One trial: draw a random first-snapshot subarray, score elements from it,
pick the second-snapshot subarray, complete the full ULA, estimate
directions and match them against the truth.
"""
from __future__ import annotations

import csv
import json
import logging
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .array_model import SamplingMask, Snapshot, SourceScene, project, synthesize_snapshot
from .completion import AdmmConfig, complete, nmse
from .doa import estimate_doa, match_detections
from .exceptions import HankelDoaError
from .hankel import HankelShape
from .leverage import leverage_scores, select_elements
from .svgplot import line_chart

__all__ = [
    "MODES",
    "ExperimentConfig",
    "TrialRecord",
    "run_pipeline",
    "run_campaign",
    "summarize",
    "emit_outputs",
    "scenario_ii_scene",
    "scenario_i_scene",
    "trial_seed",
]

log = logging.getLogger(__name__)

MODES = ("leverage-top-m", "leverage-probabilistic", "uniform-random")

#: relative singular-value threshold for the order of a completed vector
COMPLETED_RANK_TOL = 1e-6


def scenario_ii_scene() -> SourceScene:
    """Five-source scene of the array-size experiment (angles in degrees)."""
    return SourceScene.from_angles(
        [-23.80, 15.60, 16.20, -17.53, 18.13], [3.31, 3.2, 2.13, 3.14, 3.56]
    )


def scenario_i_scene() -> SourceScene:
    """Reconstructed six-source scene with a near-collocated triplet.

    The triplet sits at 16 +/- 0.3 degrees; the other three sources are
    well separated. Positions are a reconstruction, not published data.
    """
    return SourceScene.from_angles(
        [-40.0, -12.0, 15.7, 16.0, 16.3, 48.0], [2.5, 3.0, 3.2, 2.8, 3.5, 2.2]
    )


@dataclass(frozen=True)
class ExperimentConfig:
    scene: SourceScene
    n: int
    m_values: tuple
    trials: int = 100
    modes: tuple = ("leverage-top-m", "uniform-random")
    admm: AdmmConfig = field(default_factory=AdmmConfig)
    detection_threshold: float = 0.005
    base_seed: int = 0
    doa_method: str = "matrix-pencil"

    def __post_init__(self):
        object.__setattr__(self, "m_values", tuple(int(m) for m in self.m_values))
        object.__setattr__(self, "modes", tuple(self.modes))
        if not self.m_values:
            raise ValueError("m_values must not be empty")
        if any(m > self.n or m < 1 for m in self.m_values):
            raise ValueError(f"every m must lie in 1..n={self.n}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        bad = set(self.modes) - set(MODES)
        if bad or not self.modes:
            raise ValueError(f"unknown sampling modes {sorted(bad)}; choose from {MODES}")

    def to_dict(self) -> dict:
        return {
            "scene": self.scene.to_dict(),
            "n": self.n,
            "m_values": list(self.m_values),
            "trials": self.trials,
            "modes": list(self.modes),
            "admm": asdict(self.admm),
            "detection_threshold": self.detection_threshold,
            "base_seed": self.base_seed,
            "doa_method": self.doa_method,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        scene = SourceScene.from_dict(data.pop("scene"))
        admm = AdmmConfig(**data.pop("admm", {}))
        if "sampling_mode" in data:
            data["modes"] = [data.pop("sampling_mode")]
        known = {"n", "m_values", "trials", "modes", "detection_threshold", "base_seed",
                 "doa_method"}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config fields {sorted(extra)}")
        return cls(scene=scene, admm=admm, **data)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    m: int
    mode: str
    seed: int
    recovered_all: bool
    nmse: float
    n_detected: int
    n_false_positive: int
    m_active: int
    rank_estimate: int
    admm_iters: int
    converged: bool
    seconds: float
    error: str = ""

    @classmethod
    def columns(cls) -> list:
        return list(cls.__dataclass_fields__)


def trial_seed(base_seed: int, trial: int) -> int:
    return (int(base_seed) ^ int(trial)) & 0xFFFFFFFFFFFFFFFF


def _draw_uniform(n: int, m: int, rng: np.random.Generator) -> SamplingMask:
    return SamplingMask(n, tuple(rng.choice(n, size=m, replace=False) + 1))


def run_pipeline(scene: SourceScene, n: int, m: int, mode: str,
                 admm_cfg: Optional[AdmmConfig] = None, seed: int = 0, *,
                 trial: int = 0, detection_threshold: float = 0.005,
                 doa_method: str = "matrix-pencil", noise_std: float = 0.0) -> TrialRecord:
    """Run one two-snapshot trial and score it against ``scene``.

    Module errors are captured into the record (``error`` column) instead
    of propagating, so one bad draw cannot abort a campaign.
    """
    admm_cfg = AdmmConfig() if admm_cfg is None else admm_cfg
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    t0 = time.perf_counter()
    shape = HankelShape.square(n)
    ss = np.random.SeedSequence(seed)
    rng_first, rng_select, rng_noise1, rng_noise2 = (np.random.default_rng(s) for s in ss.spawn(4))
    fields = dict(trial=trial, m=m, mode=mode, seed=int(seed))
    try:
        first_mask = _draw_uniform(n, m, rng_first)
        y1 = synthesize_snapshot(scene, n, seed=int(rng_noise1.integers(2**63)), noise_std=noise_std)
        y1_obs = project(y1, first_mask)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            first = complete(y1_obs, shape, admm_cfg)
        scores = leverage_scores(y1_obs, shape, rank=first.factor_rank)

        if mode == "uniform-random":
            mask = _draw_uniform(n, m, rng_select)
        else:
            sub = "top-m" if mode == "leverage-top-m" else "probabilistic"
            plan = select_elements(scores, m, sub, seed=int(rng_select.integers(2**63)))
            mask = plan.mask

        y2 = synthesize_snapshot(scene, n, seed=int(rng_noise2.integers(2**63)), noise_std=noise_std)
        y2_obs = project(y2, mask)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            result = complete(y2_obs, shape, admm_cfg, rank_estimate=scores.rank_used)
            y_hat = result.y_hat
            err = 0.0 if mask.is_full else nmse(y_hat, y2.values, mask)

            order = leverage_scores(Snapshot(y_hat), shape, COMPLETED_RANK_TOL).rank_used
            r_hat = max(1, min(order, (n - 1) // 2))
            est = estimate_doa(y_hat, r_hat, doa_method)
        report = match_detections(scene, est, detection_threshold)
        return TrialRecord(**fields, recovered_all=report.all_detected, nmse=err,
                           n_detected=report.n_detected,
                           n_false_positive=len(report.false_positives),
                           m_active=mask.m, rank_estimate=scores.rank_used,
                           admm_iters=result.iters_used, converged=result.converged,
                           seconds=time.perf_counter() - t0)
    except (HankelDoaError, np.linalg.LinAlgError) as exc:
        log.warning("trial %d (m=%d, %s) failed: %s", trial, m, mode, exc)
        return TrialRecord(**fields, recovered_all=False, nmse=float("nan"), n_detected=0,
                           n_false_positive=0, m_active=0, rank_estimate=0, admm_iters=0,
                           converged=False, seconds=time.perf_counter() - t0,
                           error=f"{type(exc).__name__}: {exc}")


def _run_one(args) -> TrialRecord:
    cfg, trial, m, mode = args
    return run_pipeline(cfg.scene, cfg.n, m, mode, cfg.admm, trial_seed(cfg.base_seed, trial),
                        trial=trial, detection_threshold=cfg.detection_threshold,
                        doa_method=cfg.doa_method)


def run_campaign(cfg: ExperimentConfig, jobs: int = 1):
    """All trials for every ``(m, mode)`` pair, plus the per-pair summary.

    Trial ``t`` uses seed ``base_seed ^ t`` for every ``m`` and mode, so
    modes are compared on the same first-snapshot draws and the output is
    independent of ``jobs``.
    """
    tasks = [(cfg, t, m, mode) for m in cfg.m_values for mode in cfg.modes
             for t in range(cfg.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        records = [_run_one(t) for t in tasks]
    records.sort(key=lambda r: (r.m, cfg.modes.index(r.mode), r.trial))
    return records, summarize(records, cfg.modes)


def summarize(records: Sequence[TrialRecord], modes: Sequence[str] = MODES) -> list:
    """Per ``(m, mode)`` recovery rate and mean/median NMSE."""
    rows = []
    ms = sorted({r.m for r in records})
    for m in ms:
        for mode in modes:
            sel = [r for r in records if r.m == m and r.mode == mode]
            if not sel:
                continue
            errs = np.array([r.nmse for r in sel], dtype=float)
            finite = errs[np.isfinite(errs)]
            rows.append({
                "m": m,
                "mode": mode,
                "trials": len(sel),
                "recovery_rate": sum(r.recovered_all for r in sel) / len(sel),
                "mean_nmse": float(finite.mean()) if finite.size else float("nan"),
                "median_nmse": float(np.median(finite)) if finite.size else float("nan"),
                "failed_trials": sum(bool(r.error) for r in sel),
            })
    return rows


def _fmt(v):
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, float):
        return repr(v)
    return v


def emit_outputs(records: Sequence[TrialRecord], summary: list, out_dir,
                 config: Optional[ExperimentConfig] = None, include_timing: bool = False) -> list:
    """Write trial/summary CSVs, two SVG charts and ``run_meta.json``.

    Wall-clock seconds are left out of ``trials.csv`` unless
    ``include_timing`` is set, so repeated runs are byte-identical.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        cols = TrialRecord.columns()
        if not include_timing:
            cols.remove("seconds")
        paths = []
        p = out / "trials.csv"
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for r in records:
                w.writerow([_fmt(getattr(r, c)) for c in cols])
        paths.append(p)

        p = out / "summary.csv"
        scols = ["m", "mode", "trials", "recovery_rate", "mean_nmse", "median_nmse",
                 "failed_trials"]
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(scols)
            for row in summary:
                w.writerow([_fmt(row[c]) for c in scols])
        paths.append(p)

        modes = list(dict.fromkeys(row["mode"] for row in summary))
        series = {mode: [(row["m"], row["recovery_rate"]) for row in summary if row["mode"] == mode]
                  for mode in modes}
        p = out / "recovery_rate.svg"
        p.write_text(line_chart(series, title="Recovery rate vs active elements",
                                xlabel="active elements m", ylabel="recovery rate"))
        paths.append(p)

        series = {mode: [(row["m"], row["mean_nmse"]) for row in summary
                         if row["mode"] == mode and np.isfinite(row["mean_nmse"])
                         and row["mean_nmse"] > 0]
                  for mode in modes}
        p = out / "nmse.svg"
        p.write_text(line_chart(series, title="Interpolation NMSE vs active elements",
                                xlabel="active elements m", ylabel="mean NMSE", logy=True))
        paths.append(p)

        meta = {
            "version": __version__,
            "config": config.to_dict() if config is not None else None,
            "trial_seeds": sorted({r.seed for r in records}),
            "records": len(records),
        }
        p = out / "run_meta.json"
        p.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        paths.append(p)
    except OSError as exc:
        raise OSError(f"cannot write outputs to {out}: {exc}") from exc
    return paths
