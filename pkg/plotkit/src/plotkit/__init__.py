"""Figure generation for switchsim sweep and factor-threshold CSVs."""

from .plots import (
    EmptyPlotError,
    MissingColumnError,
    PlotSpec,
    ScalingResult,
    ThresholdResult,
    plot_scaling,
    plot_threshold,
    scaling_series,
    threshold_series,
)

__all__ = [
    "EmptyPlotError",
    "MissingColumnError",
    "PlotSpec",
    "ScalingResult",
    "ThresholdResult",
    "plot_scaling",
    "plot_threshold",
    "scaling_series",
    "threshold_series",
]
