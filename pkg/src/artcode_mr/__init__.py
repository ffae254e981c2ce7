"""Metamorphic-relation augmented Artcode classification.

Synthetic marker generation and decoding, SOH features, random-forest and
linear-SVM classifiers, Separation/Occlusion follow-ups with rho-based
rectification, group-level statistical verification and cross-validated
evaluation.
"""

from ._kernels import BACKEND
from .artcode import ArtcodeCode, GenSpec, Style, decode, generate_dataset, load_manifest, render
from .classifier import Prediction, TrainConfig, TrainedModel, load_model, save_model, train
from .evaluation import ConfusionCounts, CvPlan, MetricSet, compute_metrics, rectification_report, run_cv
from .features import SohConfig, extract_soh
from .image import GrayImage, read_pgm, write_pgm
from .mr import MrConfig, Thresholds, WeightVector, aggregate_rho, build_masks, classify_augmented, rectify
from .stats import RhoGroup, VerifyConfig, run_verification

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ArtcodeCode", "ConfusionCounts", "CvPlan", "GenSpec", "GrayImage", "MetricSet", "MrConfig",
    "Prediction", "RhoGroup", "SohConfig", "Style", "Thresholds", "TrainConfig", "TrainedModel", "VerifyConfig",
    "WeightVector", "aggregate_rho", "build_masks", "classify_augmented", "compute_metrics", "decode",
    "extract_soh", "generate_dataset", "load_manifest", "load_model", "read_pgm", "rectification_report",
    "rectify", "render", "run_cv", "run_verification", "save_model", "train", "write_pgm",
]
