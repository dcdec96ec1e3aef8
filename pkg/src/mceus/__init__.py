"""Computational enhancement for molecularly targeted contrast-enhanced
ultrasound (mCEUS) cine loops.

Separates bound-agent signal from free-flowing contrast and tissue
leakage: a pre-contrast maximum-intensity background model with a
spread-ratio quality metric, temporal-window flow suppression (MinIP,
PerIP, and a mean-offset statistical estimator), morphological closing,
ROI contrast metrics, a seeded synthetic phantom with ground truth, a
batch CLI, and an HTTP service for interactive viewers.
"""
from .model import (
    CineLoop,
    DegenerateReferenceError,
    LoadError,
    PipelineConfig,
    Roi,
    RoiSet,
    as_frame,
    build_roi_set,
    polygon_mask,
)
from .flow import (
    WindowSpec,
    WindowStats,
    extract_time_series,
    minip_window,
    perip_window,
    project_loop,
    stat_window,
)
from .leakage import LeakageModel, build_leakage_model, spread_ratio, subtract_leakage
from .morphology import StructuringElement, close, dilate, disk, erode
from .pipeline import (
    MetricsReport,
    contrast_ratio,
    default_evaluation_index,
    evaluate,
    improvement_factor,
    roi_means,
    run_pipeline,
)
from .phantom import (
    BindingParams,
    Ellipse,
    FlowParams,
    GroundTruth,
    LeakagePatch,
    MotionParams,
    PhantomSpec,
    case6_phantom,
    case6_rois,
    case6_spec,
    generate,
    high_flow_phantom,
    high_flow_rois,
    high_flow_spec,
)
from .io import (
    load_cine_loop,
    load_frame,
    load_rois,
    save_cine_loop,
    save_frame,
    write_time_series_csv,
)

__version__ = "0.1.0"

__all__ = [
    "BindingParams",
    "CineLoop",
    "DegenerateReferenceError",
    "Ellipse",
    "FlowParams",
    "GroundTruth",
    "LeakageModel",
    "LeakagePatch",
    "LoadError",
    "MetricsReport",
    "MotionParams",
    "PhantomSpec",
    "PipelineConfig",
    "Roi",
    "RoiSet",
    "StructuringElement",
    "WindowSpec",
    "WindowStats",
    "as_frame",
    "build_leakage_model",
    "build_roi_set",
    "case6_phantom",
    "case6_rois",
    "case6_spec",
    "close",
    "contrast_ratio",
    "default_evaluation_index",
    "dilate",
    "disk",
    "erode",
    "evaluate",
    "extract_time_series",
    "generate",
    "high_flow_phantom",
    "high_flow_rois",
    "high_flow_spec",
    "improvement_factor",
    "load_cine_loop",
    "load_frame",
    "load_rois",
    "minip_window",
    "perip_window",
    "polygon_mask",
    "project_loop",
    "roi_means",
    "run_pipeline",
    "save_cine_loop",
    "save_frame",
    "spread_ratio",
    "stat_window",
    "subtract_leakage",
    "write_time_series_csv",
]
