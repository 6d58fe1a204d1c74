"""Leverage-guided sparse-array DOA estimation with Hankel matrix completion."""

__version__ = "0.1.0"

from .array_model import (
    SamplingMask,
    Snapshot,
    SourceScene,
    project,
    synthesize_snapshot,
    tau_to_angle_degrees,
)
from .completion import AdmmConfig, CompletionResult, complete, nmse, nuclear_norm
from .doa import DetectionReport, DoaEstimate, estimate_doa, match_detections
from .hankel import HankelShape, dehankelize, default_pencil, hankel_adjoint, hankelize
from .leverage import (
    LeverageScores,
    SamplingPlan,
    edge_energy_condition,
    leverage_scores,
    sampling_probability_bound,
    select_elements,
)

__all__ = [
    "SamplingMask", "Snapshot", "SourceScene", "project", "synthesize_snapshot",
    "tau_to_angle_degrees", "AdmmConfig", "CompletionResult", "complete", "nmse",
    "nuclear_norm", "DetectionReport", "DoaEstimate", "estimate_doa", "match_detections",
    "HankelShape", "dehankelize", "default_pencil", "hankel_adjoint", "hankelize",
    "LeverageScores", "SamplingPlan", "edge_energy_condition", "leverage_scores",
    "sampling_probability_bound", "select_elements",
]
