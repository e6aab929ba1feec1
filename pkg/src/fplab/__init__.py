"""Contraction classes, fixed points and certified Picard iteration on finite metric spaces."""
from .classifiers import (
    ALL_KINDS,
    THRESHOLDS,
    ClassificationReport,
    ContractionKind,
    classify_all,
    grid_falsify,
    lhs_rhs,
    minimal_constant,
)
from .dynamics import OrbitAnalysis, analyze, fixed_points, period2_points
from .generator import GeneratorConfig, random_instance, random_map, random_space
from .metric_core import (
    FiniteMetricSpace,
    MetricValidationError,
    SampledSystem,
    SelfMap,
    iterate,
    load_instance,
    perimeter,
    validate_metric,
)
from .picard import ConvergenceCertificate, PicardTrace, StopReason, check_trace, make_certificate, run_picard

__version__ = "0.1.0"
