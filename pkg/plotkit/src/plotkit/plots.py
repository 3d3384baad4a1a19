"""Scaling-curve and threshold plots over experiment CSV files.

This package is a read-only consumer of two CSV schemas: sweep rows
(per-run queue statistics keyed by n, rho, policy) and factor rows
(per-trial largest-envelope sizes against a threshold beta0).  All numeric
series are pure functions of the CSV contents; images are a rendering of
those series.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class MissingColumnError(ValueError):
    """The CSV lacks a column the plot needs."""


class EmptyPlotError(ValueError):
    """The CSV has a header but no data rows to plot."""


@dataclass
class PlotSpec:
    """What to plot and where to write it."""

    input_path: str
    kind: str  # "scaling" | "threshold"
    output_path: str
    x_axis: str = "n"  # scaling only: "n" | "inv-gap"
    scale: str = "log"  # axis scale: "log" | "linear"
    group_by: tuple[str, ...] = ("policy",)

    def __post_init__(self) -> None:
        if self.kind not in ("scaling", "threshold"):
            raise ValueError(f"unknown plot kind {self.kind!r}")
        if self.x_axis not in ("n", "inv-gap"):
            raise ValueError(f"unknown x axis {self.x_axis!r}")
        if self.scale not in ("log", "linear"):
            raise ValueError(f"unknown axis scale {self.scale!r}")


def read_csv_columns(text: str, required: tuple[str, ...]) -> list[dict[str, str]]:
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    missing = [name for name in required if name not in header]
    if missing:
        raise MissingColumnError(f"CSV is missing columns: {missing}")
    rows = list(reader)
    if not rows:
        raise EmptyPlotError("CSV has no data rows; nothing to plot")
    return rows


@dataclass
class ScalingSeries:
    label: str
    x: np.ndarray
    y: np.ndarray  # mean_total_queue averaged over replications per x
    slope: float  # least-squares slope in log-log coordinates


@dataclass
class ScalingResult:
    series: list[ScalingSeries]
    guides: dict[str, np.ndarray] = field(default_factory=dict)


def _x_value(row: dict[str, str], x_axis: str) -> float:
    if x_axis == "n":
        return float(row["n"])
    return 1.0 / (1.0 - float(row["rho"]))


def fit_loglog_slope(x: np.ndarray, y: np.ndarray) -> float:
    if len(x) < 2:
        return float("nan")
    coeffs = np.polyfit(np.log(x), np.log(y), 1)
    return float(coeffs[0])


def scaling_series(text: str, spec: PlotSpec) -> ScalingResult:
    """Grouped (x, mean queue) series plus the two reference guides."""
    rows = read_csv_columns(
        text, required=("n", "rho", "mean_total_queue") + spec.group_by
    )
    groups: dict[str, dict[float, list[float]]] = {}
    reference: dict[float, tuple[float, float]] = {}
    for row in rows:
        label = "/".join(row[col] for col in spec.group_by)
        x = _x_value(row, spec.x_axis)
        groups.setdefault(label, {}).setdefault(x, []).append(
            float(row["mean_total_queue"])
        )
        reference[x] = (float(row["n"]), float(row["rho"]))
    series = []
    for label in sorted(groups):
        points = groups[label]
        xs = np.array(sorted(points))
        ys = np.array([np.mean(points[x]) for x in xs])
        series.append(ScalingSeries(label, xs, ys, fit_loglog_slope(xs, ys)))
    # reference scalings n*(1-rho)^(-4/3) and n*(1-rho)^(-2), anchored at
    # the first point of the first series
    guides: dict[str, np.ndarray] = {}
    anchor = series[0]
    xs = anchor.x
    pairs = np.array([reference[x] for x in xs])
    for name, exponent in (("n(1-rho)^-4/3", 4.0 / 3.0), ("n(1-rho)^-2", 2.0)):
        raw = pairs[:, 0] * (1.0 - pairs[:, 1]) ** -exponent
        guides[name] = raw * (anchor.y[0] / raw[0])
    return ScalingResult(series=series, guides=guides)


def plot_scaling(spec: PlotSpec) -> ScalingResult:
    """Render mean queue size against n or 1/(1-rho), one line per group,
    with reference slope guides; prints the fitted log-log slope of every
    series and writes the image."""
    with open(spec.input_path, encoding="utf-8") as handle:
        result = scaling_series(handle.read(), spec)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for s in result.series:
        ax.plot(s.x, s.y, marker="o", label=f"{s.label} (slope {s.slope:.3f})")
        print(f"{s.label}: fitted log-log slope = {s.slope:.6f}")
    for name, ys in result.guides.items():
        ax.plot(result.series[0].x, ys, linestyle="--", linewidth=1.0, label=name)
    if spec.scale == "log":
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel("n" if spec.x_axis == "n" else "1/(1-rho)")
    ax.set_ylabel("mean total queue")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.output_path, dpi=150)
    plt.close(fig)
    return result


@dataclass
class ThresholdResult:
    betas: np.ndarray  # candidate envelope sizes
    fractions: np.ndarray  # empirical fraction of trials with beta* >= beta
    beta0: list[int]  # distinct thresholds found in the file


def threshold_series(text: str) -> ThresholdResult:
    """Success fraction re-scored from the beta_star column at every
    candidate envelope size up to one past the largest observed."""
    rows = read_csv_columns(text, required=("beta_star", "beta0"))
    stars = np.array([int(row["beta_star"]) for row in rows])
    beta0 = sorted({int(row["beta0"]) for row in rows})
    betas = np.arange(0, stars.max() + 2)
    fractions = np.array([(stars >= beta).mean() for beta in betas])
    return ThresholdResult(betas=betas, fractions=fractions, beta0=beta0)


def plot_threshold(spec: PlotSpec) -> ThresholdResult:
    """Render the empirical success-fraction curve with a vertical guide at
    each distinct beta0 and write the image."""
    with open(spec.input_path, encoding="utf-8") as handle:
        result = threshold_series(handle.read())
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.step(result.betas, result.fractions, where="post", label="P(beta* >= beta)")
    for value in result.beta0:
        ax.axvline(value, linestyle="--", linewidth=1.0, color="tab:red")
    if result.beta0:
        ax.text(result.beta0[0], 0.5, f" beta0={result.beta0[0]}", fontsize=8)
    ax.set_xlabel("beta")
    ax.set_ylabel("success fraction")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.output_path, dpi=150)
    plt.close(fig)
    return result
