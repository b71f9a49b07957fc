"""Numerical differential geometry of de Sitter space as a quadric in five-dimensional flat space."""

from .ambient import Quadric, Signature, constraint_residual, flat_inner
from .charts import CHART_NAMES, chart_metric, make_chart
from .config import RunConfig, load_config
from .errors import ConfigError, GeometryError
from .report import Report
from .tensor import MetricField, christoffel, covariant_derivative, riemann, sectional_curvature

__all__ = [
    "CHART_NAMES",
    "ConfigError",
    "GeometryError",
    "MetricField",
    "Quadric",
    "Report",
    "RunConfig",
    "Signature",
    "chart_metric",
    "christoffel",
    "constraint_residual",
    "covariant_derivative",
    "flat_inner",
    "load_config",
    "make_chart",
    "riemann",
    "sectional_curvature",
]
