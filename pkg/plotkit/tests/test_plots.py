"""Series math and figure generation for both plot kinds."""

import numpy as np
import pytest

from plotkit.plots import (
    EmptyPlotError,
    MissingColumnError,
    PlotSpec,
    plot_scaling,
    plot_threshold,
    scaling_series,
    threshold_series,
)

SWEEP_HEADER = (
    "n,rho,policy,seed,horizon_slots,mean_total_queue,max_total_queue,"
    "waste_slots,idle_slots,batches_with_positive_U,mean_B"
)


def sweep_csv(rows):
    lines = [SWEEP_HEADER]
    for n, rho, policy, mean_queue in rows:
        lines.append(f"{n},{rho},{policy},0,100,{mean_queue},0,0,0,0,0.0")
    return "\n".join(lines) + "\n"


def factor_csv(stars, beta0):
    lines = ["n,m,p,trial,seed,beta_star,beta0,success"]
    for trial, star in enumerate(stars):
        lines.append(f"6,4,0.5,{trial},9,{star},{beta0},{int(star >= beta0)}")
    return "\n".join(lines) + "\n"


def spec_for(tmp_path, text, kind, **kwargs):
    source = tmp_path / "input.csv"
    source.write_text(text)
    return PlotSpec(
        input_path=str(source),
        kind=kind,
        output_path=str(tmp_path / "figure.png"),
        **kwargs,
    )


# ---------------------------------------------------------------------------
# scaling
# ---------------------------------------------------------------------------

def test_synthetic_power_law_slope_recovered(tmp_path, capsys):
    rows = [(n, 0.8, "lower-envelope", float(n) ** (7.0 / 3.0)) for n in (4, 8, 16, 32, 64)]
    spec = spec_for(tmp_path, sweep_csv(rows), "scaling")
    result = plot_scaling(spec)
    slope = result.series[0].slope
    assert slope == pytest.approx(7.0 / 3.0, abs=0.01)
    assert "fitted log-log slope" in capsys.readouterr().out
    assert (tmp_path / "figure.png").stat().st_size > 0


def test_two_policies_two_series(tmp_path):
    rows = [
        (4, 0.8, "max-weight", 10.0),
        (8, 0.8, "max-weight", 20.0),
        (4, 0.8, "lower-envelope", 30.0),
        (8, 0.8, "lower-envelope", 60.0),
    ]
    result = plot_scaling(spec_for(tmp_path, sweep_csv(rows), "scaling"))
    assert [s.label for s in result.series] == ["lower-envelope", "max-weight"]
    assert all(len(s.x) == 2 for s in result.series)
    # guides evaluate the reference scalings, anchored at the first point
    assert set(result.guides) == {"n(1-rho)^-4/3", "n(1-rho)^-2"}
    for ys in result.guides.values():
        assert ys[0] == pytest.approx(result.series[0].y[0])


def test_replications_average_per_x():
    text = sweep_csv([(4, 0.8, "p", 10.0), (4, 0.8, "p", 30.0), (8, 0.8, "p", 40.0)])
    result = scaling_series(text, PlotSpec("x", "scaling", "y"))
    assert result.series[0].y.tolist() == [20.0, 40.0]


def test_inv_gap_axis():
    text = sweep_csv([(16, 0.5, "p", 1.0), (16, 0.9, "p", 2.0)])
    result = scaling_series(text, PlotSpec("x", "scaling", "y", x_axis="inv-gap"))
    assert result.series[0].x.tolist() == pytest.approx([2.0, 10.0])


def test_scaling_series_deterministic():
    text = sweep_csv([(4, 0.8, "p", 10.0), (8, 0.8, "p", 40.0)])
    spec = PlotSpec("x", "scaling", "y")
    first = scaling_series(text, spec)
    second = scaling_series(text, spec)
    assert np.array_equal(first.series[0].y, second.series[0].y)
    assert first.series[0].slope == second.series[0].slope


def test_empty_csv_raises_named_error(tmp_path):
    spec = spec_for(tmp_path, SWEEP_HEADER + "\n", "scaling")
    with pytest.raises(EmptyPlotError, match="no data rows"):
        plot_scaling(spec)


def test_missing_column_raises(tmp_path):
    spec = spec_for(tmp_path, "a,b\n1,2\n", "scaling")
    with pytest.raises(MissingColumnError):
        plot_scaling(spec)


def test_bad_spec_rejected():
    with pytest.raises(ValueError):
        PlotSpec("x", "volume", "y")
    with pytest.raises(ValueError):
        PlotSpec("x", "scaling", "y", x_axis="rho")


# ---------------------------------------------------------------------------
# threshold
# ---------------------------------------------------------------------------

FIXTURE_STARS = [5, 7, 7, 8, 9, 9, 9, 10, 11, 12]  # 10 trials


def test_threshold_fractions_match_hand_count(tmp_path):
    spec = spec_for(tmp_path, factor_csv(FIXTURE_STARS, beta0=9), "threshold")
    result = plot_threshold(spec)
    # hand-computed fraction of trials with beta* >= beta
    expected = {
        0: 1.0, 5: 1.0, 6: 0.9, 7: 0.9, 8: 0.7, 9: 0.6,
        10: 0.3, 11: 0.2, 12: 0.1, 13: 0.0,
    }
    lookup = dict(zip(result.betas.tolist(), result.fractions.tolist()))
    for beta, fraction in expected.items():
        assert lookup[beta] == pytest.approx(fraction)
    assert result.beta0 == [9]
    assert (tmp_path / "figure.png").stat().st_size > 0


def test_threshold_all_success_is_flat_at_one():
    result = threshold_series(factor_csv([4, 4, 5], beta0=3))
    cutoff = min([4, 4, 5])
    for beta, fraction in zip(result.betas, result.fractions):
        if beta <= cutoff:
            assert fraction == 1.0


def test_threshold_constant_beta0_single_guide():
    result = threshold_series(factor_csv([3, 4], beta0=2))
    assert result.beta0 == [2]


def test_threshold_missing_column():
    with pytest.raises(MissingColumnError):
        threshold_series("n,m\n1,2\n")
