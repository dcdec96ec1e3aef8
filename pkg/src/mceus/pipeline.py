"""End-to-end enhancement pipeline and lesion/normal evaluation metrics.

Stage order: flow disambiguation, then morphological closing of each
projected frame, then leakage-model subtraction, then a final clamp to
[0, 1]. The closing runs before leakage removal so that gap filling
operates on the flow-suppressed image, not on the subtracted residue.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import morphology
from .flow import WindowSpec, project_loop
from .leakage import LeakageModel, build_leakage_model, subtract_leakage
from .model import CineLoop, PipelineConfig, RoiSet

EPS_DENOM = 1e-6
BASELINE_DEFINITION = "raw frame at the matched evaluation input index"


@dataclass(frozen=True)
class MetricsReport:
    """ROI evaluation of one enhanced frame, plus enough context to rerun it."""

    lesion_mean: float
    normal_mean: float
    contrast_ratio: float
    evaluation_index: int
    evaluation_input_window: tuple[int, int]
    config: PipelineConfig
    spread_ratio: float
    improvement_factor: float | None = None
    baseline_contrast_ratio: float | None = None
    baseline_lesion_mean: float | None = None
    baseline_normal_mean: float | None = None
    baseline_definition: str | None = None

    def to_dict(self) -> dict:
        out = {
            "lesion_mean": self.lesion_mean,
            "normal_mean": self.normal_mean,
            "contrast_ratio": self.contrast_ratio,
            "evaluation_index": self.evaluation_index,
            "evaluation_input_window": list(self.evaluation_input_window),
            "config": self.config.to_dict(),
            "spread_ratio": self.spread_ratio,
        }
        if self.improvement_factor is not None:
            out["improvement_factor"] = self.improvement_factor
            out["baseline"] = {
                "definition": self.baseline_definition,
                "contrast_ratio": self.baseline_contrast_ratio,
                "lesion_mean": self.baseline_lesion_mean,
                "normal_mean": self.baseline_normal_mean,
            }
        return out


def run_pipeline(loop: CineLoop, config: PipelineConfig, *, model: LeakageModel | None = None) -> np.ndarray:
    """Run the full enhancement chain; returns a (m, h, w) float64 stack.

    m = n_frames for method "none", else n_frames - window_w + 1. A
    prebuilt leakage model may be passed to avoid recomputation; it must
    come from the same loop.
    """
    if config.method == "none":
        frames = loop.frames.copy()
    else:
        frames = project_loop(
            loop,
            WindowSpec(w=config.window_w),
            config.method,
            alpha=config.alpha,
            percentile_p=config.percentile_p,
        )
    if config.closure_radius > 0:
        for i in range(frames.shape[0]):
            frames[i] = morphology.close(frames[i], config.closure_radius)
    if config.leakage_removal:
        if model is None:
            model = build_leakage_model(loop)
        np.subtract(frames, model.model[None, :, :], out=frames)
        np.maximum(frames, 0.0, out=frames)
    np.clip(frames, 0.0, 1.0, out=frames)
    return frames


def roi_means(frame: np.ndarray, rois: RoiSet) -> tuple[float, float, float]:
    """Lesion and normal ROI means plus their ratio (1e-6 denominator floor)."""
    try:
        lesion = rois.get("lesion")
        normal = rois.get("normal")
    except KeyError as exc:
        raise ValueError(f"rois must contain a {exc.args[0]!r} entry") from None
    if not lesion.mask.any():
        raise ValueError("lesion roi mask is empty")
    if not normal.mask.any():
        raise ValueError("normal roi mask is empty")
    lesion_mean = float(frame[lesion.mask].mean())
    normal_mean = float(frame[normal.mask].mean())
    return lesion_mean, normal_mean, contrast_ratio(lesion_mean, normal_mean)


def contrast_ratio(lesion_mean: float, normal_mean: float) -> float:
    return lesion_mean / max(normal_mean, EPS_DENOM)


def improvement_factor(enhanced_cr: float, baseline_cr: float) -> float:
    """How many times the enhanced contrast ratio exceeds the baseline one."""
    return enhanced_cr / max(baseline_cr, EPS_DENOM)


def output_count(loop: CineLoop, config: PipelineConfig) -> int:
    if config.method == "none":
        return loop.n_frames
    return loop.n_frames - config.window_w + 1


def input_window_of(output_index: int, config: PipelineConfig) -> tuple[int, int]:
    """Input frame range [first, last] that output frame k was computed from."""
    if config.method == "none":
        return (output_index, output_index)
    return (output_index, output_index + config.window_w - 1)


def default_evaluation_index(loop: CineLoop, config: PipelineConfig) -> int:
    """Output frame whose newest input sample is bolus arrival + 2 windows.

    Clamped into the valid output range, so short loops still evaluate.
    """
    target_input = loop.bolus_arrival_index + 2 * config.window_w
    if config.method == "none":
        k = target_input
    else:
        k = target_input - (config.window_w - 1)
    return max(0, min(output_count(loop, config) - 1, k))


def evaluate(
    loop: CineLoop,
    config: PipelineConfig,
    rois: RoiSet,
    *,
    evaluation_index: int | None = None,
    baseline: str = "none",
    model: LeakageModel | None = None,
    enhanced: np.ndarray | None = None,
) -> MetricsReport:
    """Compute the MetricsReport for one loop, config, and ROI set.

    baseline "raw" additionally evaluates the unprocessed frames at the
    matched input index and reports the improvement factor. A precomputed
    enhanced stack (from run_pipeline with identical config) may be passed
    to skip recomputation.
    """
    if baseline not in ("none", "raw"):
        raise ValueError(f"baseline: expected 'none' or 'raw', got {baseline!r}")
    if model is None:
        model = build_leakage_model(loop)
    if enhanced is None:
        enhanced = run_pipeline(loop, config, model=model)
    m = enhanced.shape[0]
    k = default_evaluation_index(loop, config) if evaluation_index is None else int(evaluation_index)
    if not (0 <= k < m):
        raise ValueError(f"evaluation_index {k} out of range [0, {m - 1}]")
    last = min(k + config.average_frames, m)
    frame = enhanced[k] if last == k + 1 else enhanced[k:last].mean(axis=0)
    lesion_mean, normal_mean, cr = roi_means(frame, rois)
    report = MetricsReport(
        lesion_mean=lesion_mean,
        normal_mean=normal_mean,
        contrast_ratio=cr,
        evaluation_index=k,
        evaluation_input_window=input_window_of(k, config),
        config=config,
        spread_ratio=model.spread_ratio,
    )
    if baseline == "raw":
        n = loop.n_frames
        inputs = [min(input_window_of(j, config)[1], n - 1) for j in range(k, last)]
        raw = loop.frames[inputs[0]] if len(inputs) == 1 else loop.frames[inputs].mean(axis=0)
        b_lesion, b_normal, b_cr = roi_means(raw, rois)
        report = MetricsReport(
            lesion_mean=lesion_mean,
            normal_mean=normal_mean,
            contrast_ratio=cr,
            evaluation_index=k,
            evaluation_input_window=input_window_of(k, config),
            config=config,
            spread_ratio=model.spread_ratio,
            improvement_factor=improvement_factor(cr, b_cr),
            baseline_contrast_ratio=b_cr,
            baseline_lesion_mean=b_lesion,
            baseline_normal_mean=b_normal,
            baseline_definition=BASELINE_DEFINITION,
        )
    return report
