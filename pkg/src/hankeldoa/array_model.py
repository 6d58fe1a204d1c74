"""Source scenes, ULA snapshots and sampling masks.

Element ``k`` (1-based, ``k = 1..n``) of a noiseless snapshot is

    y[k] = sum_l b_l * exp(-2j*pi*tau_l*k)

so the phase reference is a virtual element at index 0. Masks store
1-based element indices; numpy storage underneath is 0-based.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .exceptions import DimensionError, InvalidSceneError, OutOfRangeError

__all__ = [
    "SourceScene",
    "SamplingMask",
    "Snapshot",
    "steering_matrix",
    "synthesize_snapshot",
    "project",
    "tau_to_angle_degrees",
    "angle_degrees_to_tau",
    "load_scene",
    "save_scene",
    "read_snapshot_csv",
    "write_snapshot_csv",
]


@dataclass(frozen=True)
class SourceScene:
    """Point sources seen by the array.

    Parameters
    ----------
    taus : sequence of float
        Normalized spatial frequencies ``(d / lambda) * sin(phi)``.
    amplitudes : sequence of complex
        Complex amplitude of each source.
    wavelength_ratio : float
        Element spacing over wavelength, ``d / lambda``.
    """

    taus: tuple
    amplitudes: tuple
    wavelength_ratio: float = 0.5

    def __post_init__(self):
        taus = tuple(float(t) for t in self.taus)
        amps = tuple(complex(a) for a in self.amplitudes)
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "amplitudes", amps)
        if len(taus) == 0:
            raise InvalidSceneError("a scene needs at least one source")
        if len(taus) != len(amps):
            raise InvalidSceneError(
                f"{len(taus)} taus but {len(amps)} amplitudes"
            )
        if len(set(taus)) != len(taus):
            raise InvalidSceneError(f"duplicate tau values in {taus}")
        if any(a == 0 for a in amps):
            raise InvalidSceneError("every source amplitude must be nonzero")
        if not self.wavelength_ratio > 0:
            raise InvalidSceneError("wavelength_ratio must be positive")

    @classmethod
    def from_angles(cls, angles_deg, amplitudes, wavelength_ratio=0.5):
        taus = [angle_degrees_to_tau(a, wavelength_ratio) for a in angles_deg]
        return cls(tuple(taus), tuple(amplitudes), wavelength_ratio)

    @property
    def r(self) -> int:
        return len(self.taus)

    @property
    def angles_degrees(self) -> np.ndarray:
        return np.array([tau_to_angle_degrees(t, self.wavelength_ratio) for t in self.taus])

    def union(self, other: "SourceScene") -> "SourceScene":
        return SourceScene(self.taus + other.taus, self.amplitudes + other.amplitudes,
                           self.wavelength_ratio)

    def to_dict(self) -> dict:
        return {
            "wavelength_ratio": self.wavelength_ratio,
            "sources": [
                {"tau": t, "amp_re": a.real, "amp_im": a.imag}
                for t, a in zip(self.taus, self.amplitudes)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SourceScene":
        try:
            sources = data["sources"]
            taus = [float(s["tau"]) for s in sources]
            amps = [complex(float(s["amp_re"]), float(s.get("amp_im", 0.0))) for s in sources]
        except (KeyError, TypeError) as exc:
            raise InvalidSceneError(f"malformed scene description: {exc}") from exc
        return cls(tuple(taus), tuple(amps), float(data.get("wavelength_ratio", 0.5)))


@dataclass(frozen=True)
class SamplingMask:
    """Active element set ``omega`` (1-based, sorted) on an ``n``-element ULA."""

    n: int
    omega: tuple
    probabilities: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        omega = tuple(sorted(int(k) for k in self.omega))
        object.__setattr__(self, "omega", omega)
        if not 1 <= len(omega) <= self.n:
            raise DimensionError(f"mask must hold 1..{self.n} indices, got {len(omega)}")
        if len(set(omega)) != len(omega):
            raise DimensionError("mask indices must be unique")
        if omega[0] < 1 or omega[-1] > self.n:
            raise DimensionError(f"mask indices must lie in 1..{self.n}")
        if self.probabilities is not None:
            p = np.asarray(self.probabilities, dtype=float)
            if p.shape != (self.n,) or np.any(p < 0) or np.any(p > 1):
                raise DimensionError("probabilities must be a length-n vector in [0, 1]")
            object.__setattr__(self, "probabilities", p)

    @classmethod
    def full(cls, n: int) -> "SamplingMask":
        return cls(n, tuple(range(1, n + 1)))

    @classmethod
    def from_boolean(cls, selected, probabilities=None) -> "SamplingMask":
        selected = np.asarray(selected, dtype=bool)
        return cls(selected.size, tuple(np.flatnonzero(selected) + 1), probabilities)

    @property
    def m(self) -> int:
        return len(self.omega)

    @property
    def boolean(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=bool)
        out[np.asarray(self.omega) - 1] = True
        return out

    @property
    def is_full(self) -> bool:
        return self.m == self.n


@dataclass(frozen=True)
class Snapshot:
    """One read of the ULA; entries outside ``mask`` are zero."""

    values: np.ndarray
    mask: Optional[SamplingMask] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 1 or values.size < 3:
            raise DimensionError("a snapshot is a 1-D vector with at least 3 elements")
        if self.mask is not None:
            if self.mask.n != values.size:
                raise DimensionError(f"mask for n={self.mask.n} on snapshot of n={values.size}")
            if np.any(values[~self.mask.boolean] != 0):
                raise DimensionError("masked snapshot has nonzero entries outside its mask")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def is_full(self) -> bool:
        return self.mask is None


def steering_matrix(taus, n: int) -> np.ndarray:
    """``n x r`` Vandermonde matrix with columns ``exp(-2j*pi*tau*k)``, ``k = 1..n``."""
    k = np.arange(1, n + 1)
    return np.exp(-2j * np.pi * np.outer(k, np.asarray(taus, dtype=float)))


def synthesize_snapshot(scene: SourceScene, n: int, seed: int = 0,
                        noise_std: float = 0.0) -> Snapshot:
    """Full-ULA snapshot of ``scene`` with optional circular Gaussian noise."""
    if n < 3:
        raise DimensionError(f"need n >= 3, got {n}")
    if noise_std < 0:
        raise ValueError("noise_std must be nonnegative")
    y = steering_matrix(scene.taus, n) @ np.asarray(scene.amplitudes)
    if noise_std > 0:
        rng = np.random.default_rng(seed)
        y = y + noise_std * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
    return Snapshot(y)


def project(snapshot: Snapshot, mask: SamplingMask) -> Snapshot:
    """Keep entries in ``mask`` and zero the rest."""
    if mask.n != snapshot.n:
        raise DimensionError(f"mask is for n={mask.n}, snapshot has n={snapshot.n}")
    if snapshot.mask is not None:
        keep = mask.boolean & snapshot.mask.boolean
        if not keep.any():
            raise DimensionError("projection onto a disjoint mask leaves nothing observed")
        mask = SamplingMask.from_boolean(keep, mask.probabilities)
    values = np.where(mask.boolean, snapshot.values, 0)
    return Snapshot(values, mask)


def tau_to_angle_degrees(tau: float, wavelength_ratio: float = 0.5) -> float:
    """Direction (degrees from broadside) of normalized frequency ``tau``."""
    s = tau / wavelength_ratio
    if abs(s) > 1:
        raise OutOfRangeError(f"|tau|={abs(tau)} exceeds d/lambda={wavelength_ratio}")
    return float(np.degrees(np.arcsin(s)))


def angle_degrees_to_tau(angle: float, wavelength_ratio: float = 0.5) -> float:
    return float(wavelength_ratio * np.sin(np.radians(angle)))


def load_scene(path) -> SourceScene:
    with open(path) as fh:
        return SourceScene.from_dict(json.load(fh))


def save_scene(scene: SourceScene, path) -> None:
    Path(path).write_text(json.dumps(scene.to_dict(), indent=2) + "\n")


def write_snapshot_csv(snapshot: Snapshot, path) -> None:
    """Write ``index,re,im`` rows; masked-out elements are omitted."""
    keep = snapshot.mask.boolean if snapshot.mask is not None else np.ones(snapshot.n, bool)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "re", "im"])
        for k in np.flatnonzero(keep):
            v = snapshot.values[k]
            w.writerow([k + 1, repr(float(v.real)), repr(float(v.imag))])


def read_snapshot_csv(path, n: Optional[int] = None) -> Snapshot:
    """Read a snapshot CSV; if rows are missing the result carries a mask.

    ``n`` defaults to the largest index present.
    """
    idx, vals = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"index", "re", "im"} <= set(reader.fieldnames):
            raise DimensionError(f"{path}: expected header index,re,im")
        for row in reader:
            idx.append(int(row["index"]))
            vals.append(complex(float(row["re"]), float(row["im"])))
    if not idx:
        raise DimensionError(f"{path}: no samples")
    n = max(idx) if n is None else int(n)
    values = np.zeros(n, dtype=complex)
    values[np.asarray(idx) - 1] = vals
    if len(set(idx)) == n:
        return Snapshot(values)
    return Snapshot(values, SamplingMask(n, tuple(idx)))


def parse_indices(items: Iterable) -> tuple:
    """Normalize an index list given as ints or ``"1,3,5-9"`` strings."""
    out = []
    for item in items:
        if isinstance(item, str):
            for part in item.split(","):
                part = part.strip()
                if not part:
                    continue
                if "-" in part:
                    lo, hi = part.split("-")
                    out.extend(range(int(lo), int(hi) + 1))
                else:
                    out.append(int(part))
        else:
            out.append(int(item))
    return tuple(out)
