"""Figure and table emission for pipeline runs."""

from .svg import PlotSpec, ReportError, render
from .tables import (write_attribution_matrix, write_consensus, write_curve,
                     write_failed_placeholder, write_global_attribution,
                     write_metrics)

__all__ = [
    "PlotSpec",
    "ReportError",
    "render",
    "write_attribution_matrix",
    "write_consensus",
    "write_curve",
    "write_failed_placeholder",
    "write_global_attribution",
    "write_metrics",
]
