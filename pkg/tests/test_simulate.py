"""Simulation harness: grid layout, determinism, config parsing, presets."""

import math

import numpy as np
import pytest

from suretune.core import DomainError
from suretune.simulate import (
    PRESETS,
    ConfigError,
    SimSpec,
    parse_config,
    rows_to_csv_text,
    run_simulation,
    theta0_for,
    write_csv,
)

HEADER = "family,setting,n,quantity,method,value,std_error,reps,status"


class TestThetaZeroFor:
    def test_null_is_zeros(self):
        assert np.array_equal(theta0_for("null", 7), np.zeros(7))

    def test_weak_sparsity_decays_like_inverse_root(self):
        got = theta0_for("weak_sparsity", 4)
        expected = np.array([4.0, 4.0 / math.sqrt(2), 4.0 / math.sqrt(3), 2.0])
        assert got == pytest.approx(expected, abs=1e-15)

    def test_strong_sparsity_spikes_log_n_coordinates(self):
        got = theta0_for("strong_sparsity", 10)
        assert np.array_equal(got[:2], [4.0, 4.0])
        assert np.array_equal(got[2:], np.zeros(8))

    def test_custom_passthrough(self):
        vec = [1.0, -2.0, 0.5]
        assert np.array_equal(theta0_for("custom", 3, custom=vec), vec)

    def test_custom_requires_matching_vector(self):
        with pytest.raises(DomainError):
            theta0_for("custom", 3)
        with pytest.raises(DomainError):
            theta0_for("custom", 3, custom=[1.0, 2.0])

    def test_unknown_setting(self):
        with pytest.raises(DomainError):
            theta0_for("dense", 3)


class TestSimSpecValidation:
    def test_defaults_pass(self):
        spec = SimSpec()
        assert spec.family == "shrink_means"
        assert spec.setting == ("null",)
        assert spec.sizes == (10, 50, 200)
        assert spec.bootstrap_B == 0

    def test_string_setting_coerced_to_tuple(self):
        assert SimSpec(setting="weak_sparsity").setting == ("weak_sparsity",)

    def test_rejections(self):
        with pytest.raises(DomainError):
            SimSpec(family="lasso")
        with pytest.raises(DomainError):
            SimSpec(setting=("null", "dense"))
        with pytest.raises(DomainError):
            SimSpec(outer_reps=1)
        with pytest.raises(DomainError):
            SimSpec(sigma=0.0)
        with pytest.raises(DomainError):
            SimSpec(sizes=())
        with pytest.raises(DomainError):
            SimSpec(sizes=(10, 0))
        with pytest.raises(DomainError):
            SimSpec(bootstrap_B=-1)

    def test_bootstrap_options_checked_up_front(self):
        with pytest.raises(DomainError):
            SimSpec(bootstrap_B=10, bootstrap_sampler="jackknife")
        with pytest.raises(DomainError):
            SimSpec(bootstrap_B=10, bootstrap_c=0.0)
        # bad sampler is fine while the bootstrap is disabled
        SimSpec(bootstrap_B=0, bootstrap_sampler="jackknife")

    def test_custom_setting_needs_theta0_of_every_size(self):
        with pytest.raises(DomainError):
            SimSpec(setting=("custom",))
        with pytest.raises(DomainError):
            SimSpec(setting=("custom",), sizes=(3,), theta0=(1.0, 2.0))
        spec = SimSpec(setting=("custom",), sizes=(2, 2), theta0=(1.0, 2.0))
        assert spec.theta0 == (1.0, 2.0)


def _smoke_spec(**overrides):
    base = dict(family="shrink_means", setting=("null",), sizes=(8,),
                sigma=1.0, outer_reps=30, bootstrap_B=8, seed=0)
    base.update(overrides)
    return SimSpec(**base)


class TestRunSimulation:
    def test_grid_cell_emits_sixteen_rows(self):
        rows = run_simulation(_smoke_spec())
        assert len(rows) == 16
        assert all(r.status == "ok" for r in rows)
        got = {(r.quantity, r.method) for r in rows}
        expected = {
            ("edf", "monte_carlo"), ("edf", "unbiased"), ("edf", "implicit_diff"),
            ("edf", "bootstrap"), ("edf", "observed_scaled_exopt"),
            ("df", "naive"), ("df", "unbiased"), ("df", "monte_carlo"),
            ("df", "bootstrap"), ("df", "naive_bootstrap"),
            ("err", "naive"), ("err", "corrected"), ("err", "test"),
            ("err_over_n", "naive"), ("err_over_n", "corrected"),
            ("err_over_n", "test"),
        }
        assert got == expected

    def test_row_count_scales_with_grid(self):
        spec = _smoke_spec(setting=("null", "strong_sparsity"), sizes=(8, 12),
                           outer_reps=10, bootstrap_B=0)
        rows = run_simulation(spec)
        assert len(rows) == 64

    def test_disabled_bootstrap_rows_are_skipped_not_dropped(self):
        rows = run_simulation(_smoke_spec(bootstrap_B=0))
        skipped = {(r.quantity, r.method) for r in rows if r.status == "skipped"}
        assert skipped == {
            ("edf", "bootstrap"), ("df", "bootstrap"), ("df", "naive_bootstrap"),
            ("err", "corrected"), ("err_over_n", "corrected"),
        }
        for r in rows:
            if r.status == "skipped":
                assert r.value is None and r.std_error is None and r.reps == 0

    def test_soft_threshold_skips_smooth_only_methods(self):
        spec = _smoke_spec(family="soft_threshold", bootstrap_B=0, outer_reps=12)
        rows = run_simulation(spec)
        skipped = {(r.quantity, r.method) for r in rows if r.status == "skipped"}
        assert ("edf", "unbiased") in skipped
        assert ("edf", "implicit_diff") in skipped
        assert ("df", "unbiased") in skipped

    def test_fixed_rule_has_exactly_zero_excess(self):
        spec = _smoke_spec(family="singleton_shrink", bootstrap_B=0, outer_reps=30)
        rows = {(r.quantity, r.method): r for r in run_simulation(spec)}
        unbiased = rows[("edf", "unbiased")]
        assert unbiased.value == 0.0
        assert unbiased.std_error == 0.0
        # at the fixed s = 1 the plug-in df is n/2 on every draw
        naive = rows[("df", "naive")]
        assert naive.value == 4.0
        assert naive.std_error == 0.0
        assert rows[("edf", "implicit_diff")].status == "skipped"

    def test_err_over_n_is_err_divided_by_n(self):
        rows = run_simulation(_smoke_spec())
        by_key = {(r.quantity, r.method): r for r in rows}
        for method in ("naive", "corrected", "test"):
            whole = by_key[("err", method)]
            perc = by_key[("err_over_n", method)]
            assert perc.value == pytest.approx(whole.value / 8.0, rel=1e-12)

    def test_df_unbiased_is_naive_plus_edf_unbiased(self):
        rows = {(r.quantity, r.method): r for r in run_simulation(_smoke_spec())}
        lhs = rows[("df", "unbiased")].value
        rhs = rows[("df", "naive")].value + rows[("edf", "unbiased")].value
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestDeterminism:
    def test_reruns_are_byte_identical(self):
        spec = _smoke_spec()
        first = rows_to_csv_text(run_simulation(spec))
        second = rows_to_csv_text(run_simulation(spec))
        assert first == second

    def test_seed_changes_output(self):
        a = rows_to_csv_text(run_simulation(_smoke_spec(seed=0)))
        b = rows_to_csv_text(run_simulation(_smoke_spec(seed=5)))
        assert a != b

    def test_write_csv_to_path_matches_text(self, tmp_path):
        rows = run_simulation(_smoke_spec(bootstrap_B=0, outer_reps=10))
        out = tmp_path / "rows.csv"
        write_csv(rows, str(out))
        assert out.read_text() == rows_to_csv_text(rows)

    def test_header_and_sample_row(self):
        rows = run_simulation(_smoke_spec(family="singleton_shrink",
                                          bootstrap_B=0, outer_reps=30))
        text = rows_to_csv_text(rows)
        lines = text.splitlines()
        assert lines[0] == HEADER
        assert "singleton_shrink,null,8,df,naive,4,0,30,ok" in lines

    def test_values_are_twelve_significant_digit_reprs(self):
        rows = run_simulation(_smoke_spec(bootstrap_B=0, outer_reps=10))
        for line in rows_to_csv_text(rows).splitlines()[1:]:
            fields = line.split(",")
            if fields[8] != "ok":
                continue
            for field in fields[5:7]:
                assert field == f"{float(field):.12g}"


class TestParseConfig:
    def test_happy_path(self):
        text = "\n".join([
            "# simulation request",
            "family = shrink_means",
            "setting = null, strong_sparsity",
            "",
            "sizes = 10, 25",
            "sigma = 2.0",
            "outer_reps = 50",
            "bootstrap_B = 8",
            "bootstrap_sampler = bigmodel",
            "bootstrap_c = 0.5",
            "seed = 3",
        ])
        spec = parse_config(text)
        assert spec.setting == ("null", "strong_sparsity")
        assert spec.sizes == (10, 25)
        assert spec.sigma == 2.0
        assert spec.outer_reps == 50
        assert spec.bootstrap_sampler == "bigmodel"
        assert spec.bootstrap_c == 0.5
        assert spec.seed == 3

    def test_unknown_key_reports_line(self):
        with pytest.raises(ConfigError) as info:
            parse_config("family = shrink_means\nreps = 100\n")
        assert info.value.line == 2
        assert "unknown key" in str(info.value)

    def test_duplicate_key_reports_second_line(self):
        with pytest.raises(ConfigError) as info:
            parse_config("seed = 1\nsigma = 1.0\nseed = 2\n")
        assert info.value.line == 3

    def test_bad_value_reports_line(self):
        with pytest.raises(ConfigError) as info:
            parse_config("outer_reps = ten\n")
        assert info.value.line == 1

    def test_missing_equals_reports_line(self):
        with pytest.raises(ConfigError) as info:
            parse_config("family shrink_means\n")
        assert info.value.line == 1

    def test_spec_level_problem_reports_line_zero(self):
        with pytest.raises(ConfigError) as info:
            parse_config("outer_reps = 1\n")
        assert info.value.line == 0

    def test_theta0_list(self):
        text = "setting = custom\nsizes = 3\ntheta0 = 1.5, -2, 0\n"
        spec = parse_config(text)
        assert spec.theta0 == (1.5, -2.0, 0.0)


class TestPresets:
    def test_names(self):
        assert set(PRESETS) == {"paper-scale", "desk", "smoke"}

    def test_paper_scale_grid(self):
        spec = PRESETS["paper-scale"]
        expected_sizes = tuple(int(round(v)) for v in np.geomspace(10, 5000, 10))
        assert spec.sizes == expected_sizes
        assert len(spec.sizes) == 10
        assert spec.sizes[0] == 10 and spec.sizes[-1] == 5000
        assert spec.outer_reps == 5000
        assert spec.bootstrap_B == 1000
        assert spec.setting == ("null", "weak_sparsity", "strong_sparsity")

    def test_desk_grid(self):
        spec = PRESETS["desk"]
        assert spec.sizes == (10, 50, 200)
        assert spec.outer_reps == 1000
        assert spec.bootstrap_B == 200

    def test_smoke_is_small(self):
        spec = PRESETS["smoke"]
        assert spec.sizes == (10, 25)
        assert spec.outer_reps == 40
        assert spec.bootstrap_B == 16
