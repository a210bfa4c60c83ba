"""Face recognition from entropy-selected bands and dominant wavelet coefficients."""

from .config import PcaPolicy, PipelineConfig, load_config, load_profile
from .features import FeatureVector, class_scatter_report, dominant_coefficients, extract_features
from .harness import EvaluationReport, leave_one_out
from .imageio import Dataset, GrayImage, PersonRecord, load_dataset, load_grayscale_image, write_pgm
from .pca import PcaModel, fit_pca, project
from .recognize import (
    MatchResult,
    TemplateDb,
    avg_sum_squares_distance,
    build_template_db,
    classify,
    load_template_db,
    recognize_image,
    save_template_db,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset", "EvaluationReport", "FeatureVector", "GrayImage", "MatchResult", "PcaModel",
    "PcaPolicy", "PersonRecord", "PipelineConfig", "TemplateDb", "avg_sum_squares_distance",
    "build_template_db", "class_scatter_report", "classify", "dominant_coefficients",
    "extract_features", "fit_pca", "leave_one_out", "load_config", "load_dataset",
    "load_grayscale_image", "load_profile", "load_template_db", "project", "recognize_image",
    "save_template_db", "write_pgm",
]
