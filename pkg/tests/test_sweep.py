"""Tests for sweep specification, evaluation and serialization."""

import json

import numpy as np
import pytest

from qfiext import (
    Grid,
    InvalidSpec,
    ModelError,
    SweepSpec,
    load_preset,
    preset_names,
    rows_to_csv,
    rows_to_json,
    run_sweep,
)
from qfiext.sweep import CSV_HEADER

DIRECTION_FIXED = {"B": 1e-9, "phi": 0.7853981633974483, "theta": 1.0471975511965976}


def direction_spec(points=5) -> SweepSpec:
    return SweepSpec(
        model="direction",
        sweep_variable="t",
        grid=Grid(start=1e-3, stop=1e-2, points=points, scale="log"),
        fixed_params=dict(DIRECTION_FIXED),
    )


class TestGrid:
    def test_linear_values(self):
        assert Grid(0.0, 1.0, 3, "linear").values() == [0.0, 0.5, 1.0]

    def test_log_values(self):
        vals = Grid(1e-2, 1.0, 3, "log").values()
        assert vals == pytest.approx([1e-2, 1e-1, 1.0], rel=1e-12)

    def test_single_point(self):
        assert Grid(0.3, 9.9, 1, "linear").values() == [0.3]


class TestSpecValidation:
    def test_unknown_model(self):
        spec = SweepSpec("bogus", "t", Grid(0, 1, 2))
        with pytest.raises(InvalidSpec, match="model"):
            run_sweep(spec)

    def test_bad_points(self):
        spec = direction_spec()
        bad = SweepSpec(spec.model, spec.sweep_variable, Grid(0.1, 1.0, 0), spec.fixed_params)
        with pytest.raises(InvalidSpec, match=r"grid\.points"):
            run_sweep(bad)

    def test_log_scale_needs_positive_start(self):
        spec = SweepSpec("direction", "t", Grid(-1.0, 1.0, 4, "log"), dict(DIRECTION_FIXED))
        with pytest.raises(InvalidSpec, match=r"grid\.start"):
            run_sweep(spec)

    def test_start_below_stop(self):
        spec = SweepSpec("direction", "t", Grid(2.0, 1.0, 4), dict(DIRECTION_FIXED))
        with pytest.raises(InvalidSpec, match=r"grid\.start"):
            run_sweep(spec)

    def test_sweep_variable_for_model(self):
        spec = SweepSpec("nv", "kappa", Grid(1.0, 2.0, 2), {})
        with pytest.raises(InvalidSpec, match="sweep_variable"):
            run_sweep(spec)

    def test_beta_sweep_requires_flood_extension(self):
        spec = SweepSpec("direction", "beta", Grid(0.1, 1.0, 3), dict(DIRECTION_FIXED))
        with pytest.raises(InvalidSpec, match="beta"):
            run_sweep(spec)

    def test_custom_model_requires_family_file(self):
        spec = SweepSpec("custom", "theta", Grid(0.0, 1.0, 3), {})
        with pytest.raises(InvalidSpec, match="family_file"):
            run_sweep(spec)

    def test_nonfinite_fixed_param(self):
        spec = SweepSpec(
            "direction", "t", Grid(1e-3, 1e-2, 2), {"B": float("nan")}
        )
        with pytest.raises(InvalidSpec, match=r"fixed_params\.B"):
            run_sweep(spec)


class TestRunSweep:
    def test_rows_in_grid_order_with_bound_dominating(self):
        result = run_sweep(direction_spec(8))
        values = [r.sweep_value for r in result.rows]
        assert values == sorted(values)
        for row in result.rows:
            assert row.channel_qfi <= row.upper_bound * (1.0 + 1e-9)
            assert 0.0 <= row.ratio <= 1.0 + 1e-9
            assert row.generator_method == "spectral"

    def test_parallel_equals_serial(self):
        spec = direction_spec(12)
        serial = run_sweep(spec, jobs=1)
        parallel = run_sweep(spec, jobs=4)
        assert serial == parallel

    def test_missing_required_model_param(self):
        spec = SweepSpec("direction", "t", Grid(1e-3, 1e-2, 2), {"phi": 0.1})
        with pytest.raises(InvalidSpec, match=r"fixed_params\.B"):
            run_sweep(spec)

    def test_model_error_carries_grid_point(self):
        spec = SweepSpec(
            "custom",
            "theta",
            Grid(0.5, 1.5, 2),
            {},
            family_file="no-such-file.json",
        )
        with pytest.raises(ModelError, match="theta=0.5"):
            run_sweep(spec)

    def test_broken_phase_shift_model_sweep(self):
        from importlib import resources

        path = str(resources.files("qfiext").joinpath("data/fixtures/valid-family.json"))
        spec = SweepSpec(
            model="broken-phase-shift",
            sweep_variable="theta",
            grid=Grid(-1.0, 1.0, 5, "linear"),
            fixed_params={"t": 1.0},
            family_file=path,
        )
        result = run_sweep(spec)
        assert len(result.rows) == 5
        for row in result.rows:
            assert row.upper_bound == pytest.approx(4.0, rel=1e-12)  # seminorm(G)=2, t=1

    def test_epsilon_sweep_patches_extension(self):
        spec = SweepSpec(
            model="direction",
            sweep_variable="epsilon",
            grid=Grid(-0.2, 0.2, 5, "linear"),
            fixed_params={**DIRECTION_FIXED, "t": 1e-2},
            extension={"kind": "subtract-perturbed", "theta0": 1.0471975511965976, "epsilon": 0.0},
        )
        result = run_sweep(spec)
        mid = result.rows[2]  # epsilon = 0: exact subtraction saturates
        assert mid.sweep_value == pytest.approx(0.0, abs=1e-15)
        assert mid.ratio == pytest.approx(1.0, abs=1e-9)
        assert result.rows[0].ratio < 1.0


class TestSerialization:
    def test_csv_header_exact(self):
        assert CSV_HEADER == "sweep_value,channel_qfi,upper_bound,ratio,generator_method,estimated_error"

    def test_csv_round_trip_and_json_equal_values(self):
        result = run_sweep(direction_spec(6))
        csv_text = rows_to_csv(result)
        lines = csv_text.strip().split("\n")
        assert lines[0] == CSV_HEADER
        assert len(lines) == 7
        json_doc = json.loads(rows_to_json(result))
        for line, jrow, row in zip(lines[1:], json_doc["rows"], result.rows):
            fields = line.split(",")
            assert float(fields[0]) == jrow["sweep_value"] == row.sweep_value
            assert float(fields[1]) == jrow["channel_qfi"] == row.channel_qfi
            assert float(fields[2]) == jrow["upper_bound"] == row.upper_bound
            assert float(fields[3]) == jrow["ratio"] == row.ratio
            assert fields[4] == jrow["generator_method"]
            assert float(fields[5]) == jrow["estimated_error"]

    def test_csv_deterministic(self):
        spec = direction_spec(6)
        assert rows_to_csv(run_sweep(spec)) == rows_to_csv(run_sweep(spec))


class TestPresets:
    def test_names(self):
        assert preset_names() == ["fig1", "fig2", "fig3"]

    def test_fig1_structure(self):
        preset = load_preset("fig1")
        assert len(preset.runs) == 4
        assert {spec.model for spec in preset.runs} == {"nv"}
        betas = [
            spec.extension["beta"] for spec in preset.runs if spec.extension is not None
        ]
        assert betas == [1e-6, 1e-3, 1e-1]

    def test_fig2_structure(self):
        preset = load_preset("fig2")
        assert len(preset.runs) == 7
        kinds = [spec.extension["kind"] for spec in preset.runs if spec.extension]
        assert kinds.count("flood") == 3 and kinds.count("sz") == 3

    def test_fig3_structure(self):
        preset = load_preset("fig3")
        assert len(preset.runs) == 1
        spec = preset.runs[0]
        assert spec.sweep_variable == "epsilon"
        assert spec.extension["kind"] == "subtract-perturbed"

    def test_unknown_preset(self):
        with pytest.raises(InvalidSpec, match="unknown preset"):
            load_preset("fig9")
