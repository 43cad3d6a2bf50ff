"""Experiment harness: configs, determinism, sweeps, traces, CSV round-trips."""

import numpy as np
import pytest

from dcra.harness import (ConfigError, ExperimentConfig, SummaryRow,
                          config_from_values, convergence_trace, derive_seed,
                          draw_groups, load_config, mean_table, multi_user_sweep,
                          parse_config_file, read_summary, robustness_case1,
                          robustness_case2, run_single, sweep, windowed_series,
                          write_summary)
from dcra.params import DEFAULT_PARAMS, SystemParams


SMALL = ExperimentConfig(slots=20_000, window=10_000)


class TestConfigFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text(
            "# comment line\n"
            "scheme = tsra\n"
            "schemes = FSRA, FSQA\n"
            "d = 2,3\n"
            "groups = 5\n"
            "slots = 50000\n"
            "seed = 42\n"
            "p_b = 0.5\np_b_prime = 0.4\np_s = 0.7\np_s_prime = 0.6\np_t = 0.4\n")
        config = load_config(path)
        assert config.scheme == "TSRA"
        assert config.schemes == ("FSRA", "FSQA")
        assert config.d_values == (2, 3)
        assert config.groups == 5
        assert config.params == SystemParams(0.5, 0.4, 0.7, 0.6, 0.4, d1=2, d2=2)

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("sceme = TSRA\n")
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config_file(path)

    def test_bad_value_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("groups = many\n")
        with pytest.raises(ConfigError, match="bad value"):
            parse_config_file(path)

    def test_partial_instance_rejected(self):
        with pytest.raises(ConfigError, match="missing"):
            config_from_values({"p_b": 0.5})

    def test_bad_scheme_rejected(self):
        with pytest.raises(ConfigError, match="unknown scheme"):
            config_from_values({"scheme": "DQN"})

    def test_window_clamps_to_slots(self):
        config = ExperimentConfig(slots=100, window=200)
        record = run_single(config, "TSRA", DEFAULT_PARAMS, seed=0)
        assert record.window == 100


class TestRunSingle:
    def test_deterministic_records(self):
        a = run_single(SMALL, "TSRA", DEFAULT_PARAMS, seed=5)
        b = run_single(SMALL, "TSRA", DEFAULT_PARAMS, seed=5)
        assert a.throughput == b.throughput
        assert a.rho == b.rho
        assert a.policy == b.policy

    def test_different_seeds_differ(self):
        a = run_single(SMALL, "TSRA", DEFAULT_PARAMS, seed=5)
        b = run_single(SMALL, "TSRA", DEFAULT_PARAMS, seed=6)
        assert a.throughput != b.throughput

    def test_aloha_only_saturated(self):
        # backlogged ALOHA user alone transmitting every slot: rate -> p_s
        params = SystemParams(1.0, 0.4, 0.7, 0.6, 1.0, d1=2, d2=2)
        config = ExperimentConfig(slots=1_000_000, window=1_000_000)
        record = run_single(config, "ALOHA", params, seed=1)
        assert record.throughput == pytest.approx(0.7, abs=0.005)

    def test_unknown_scheme(self):
        with pytest.raises(ConfigError):
            run_single(SMALL, "NOPE", DEFAULT_PARAMS, seed=0)

    def test_throughput_in_unit_interval(self):
        rng = np.random.default_rng(0)
        for _ in range(3):
            p = draw_groups(int(rng.integers(1 << 30)), 1)[0].with_deadline(2)
            rec = run_single(SMALL, "TSRA", p, seed=0)
            assert 0.0 <= rec.throughput <= 1.0

    def test_slot_trace_csv(self, tmp_path):
        path = tmp_path / "slots.csv"
        config = ExperimentConfig(slots=500, window=500, slot_trace=str(path))
        run_single(config, "TSRA", DEFAULT_PARAMS, seed=2)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "slot,action,feedback,success_count"
        assert len(lines) == 501


class TestWindowedSeries:
    def test_trailing_window(self):
        checkpoints = [(1000, 10), (2000, 30), (3000, 60), (4000, 100)]
        series = windowed_series(checkpoints, 1000, 2000)
        assert series == [(1000, 0.01), (2000, 0.015),
                          (3000, (60 - 10) / 2000), (4000, (100 - 30) / 2000)]

    def test_window_must_divide(self):
        with pytest.raises(ConfigError):
            windowed_series([], 1000, 1500)

    def test_constant_rate_process_gives_flat_trace(self):
        params = SystemParams(1.0, 0.4, 0.7, 0.6, 1.0, d1=2, d2=2)
        config = ExperimentConfig(slots=200_000, window=100_000,
                                  trace_interval=5_000, trace_window=50_000)
        series = convergence_trace(config, "ALOHA", params, seed=3)
        tail = [thr for slot, thr in series if slot >= 50_000]
        assert max(tail) - min(tail) < 0.02


class TestSweep:
    def test_zero_groups(self):
        assert sweep(ExperimentConfig(groups=0)) == []

    def test_parallel_equals_sequential(self):
        base = dict(schemes=("TSRA", "BOUND"), d_values=(1,), groups=3,
                    slots=20_000, window=10_000, seed=77)
        seq = sweep(ExperimentConfig(jobs=1, **base))
        par = sweep(ExperimentConfig(jobs=2, **base))
        assert seq == par

    def test_paired_groups_shared_across_schemes(self):
        rows = sweep(ExperimentConfig(schemes=("TSRA", "HSRA"), d_values=(1,),
                                      groups=2, slots=5_000, window=5_000, seed=9))
        assert {r.scheme for r in rows} == {"TSRA", "HSRA"}
        assert {r.group for r in rows} == {0, 1}

    def test_derive_seed_is_stable(self):
        assert derive_seed(1, 2, "TSRA", 3) == derive_seed(1, 2, "TSRA", 3)
        assert derive_seed(1, 2, "TSRA", 3) != derive_seed(1, 2, "HSRA", 3)

    def test_summary_csv_roundtrip(self, tmp_path):
        rows = [SummaryRow("TSRA", 2, 0, 123, 0.321), SummaryRow("BOUND", 2, 1, 9, 0.4)]
        path = tmp_path / "summary.csv"
        write_summary(rows, path)
        assert read_summary(path) == rows

    def test_bound_rows_hold_lp_value(self):
        rows = sweep(ExperimentConfig(schemes=("BOUND",), d_values=(1,), groups=1,
                                      seed=4, params=DEFAULT_PARAMS.with_deadline(1)))
        assert rows[0].throughput == pytest.approx(0.276, abs=1e-6)

    def test_mean_table(self):
        rows = [SummaryRow("A", 1, 0, 0, 0.2), SummaryRow("A", 1, 1, 0, 0.4),
                SummaryRow("B", 1, 0, 0, 0.5)]
        assert mean_table(rows) == {("A", 1): pytest.approx(0.3), ("B", 1): 0.5}


class TestPresets:
    def test_case1_shapes(self):
        config = ExperimentConfig(schemes=("TSRA",), groups=1, slots=2_000,
                                  window=1_000, seed=1)
        rows = robustness_case1(config)
        assert {r.d for r in rows} == set(range(1, 11))

    def test_case2_poisson_coordinates(self):
        config = ExperimentConfig(schemes=("TSRA", "FSQA"), groups=1, slots=2_000,
                                  window=1_000, seed=2)
        rows = robustness_case2(config)
        assert {r.d for r in rows} == set(range(1, 11))  # 10*lam
        assert all(0.0 <= r.throughput <= 1.0 for r in rows)

    def test_multi_user_output_shape(self):
        config = ExperimentConfig(groups=1, slots=2_000, window=1_000, seed=3)
        rows = multi_user_sweep(config, shapes=((2, 1), (3, 2)), max_agents=2)
        coords = {(d, k, m) for d, k, m, _, _, _ in rows}
        assert coords == {(2, 1, 1), (2, 1, 2), (3, 2, 1), (3, 2, 2)}
