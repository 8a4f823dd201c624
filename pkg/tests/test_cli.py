"""Command-line runner: config handling, determinism, exit codes, outputs."""

import numpy as np
import pytest

from dnlslab import cli
from dnlslab.cli import (
    EXIT_CONFIG,
    EXIT_IDENTITY,
    EXIT_OK,
    ConfigError,
    ExperimentConfig,
    build_initial_state,
    load_config,
    main,
)
from dnlslab.lattice import l2_norm


def read_csv(path):
    rows = [
        line.split(",")
        for line in path.read_text().splitlines()
        if line and not line.startswith("#")
    ]
    header, data = rows[0], np.array([[float(x) for x in r] for r in rows[1:]])
    return header, data


class TestConfig:
    def test_defaults_validate(self):
        ExperimentConfig().validate()

    def test_file_and_overrides(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("n_points = 16\nnu = -1  # defocusing\n\ntau = 0.01\n")
        config = load_config(str(cfg), ["t_end=2.5", "seed = 7"])
        assert config.n_points == 16
        assert config.nu == -1
        assert config.tau == 0.01
        assert config.t_end == 2.5
        assert config.seed == 7

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            load_config(None, ["no_such_key=1"])

    def test_bad_value(self):
        with pytest.raises(ConfigError):
            load_config(None, ["tau=abc"])

    def test_bad_line(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("just a line without equals\n")
        with pytest.raises(ConfigError):
            load_config(str(cfg), [])

    def test_validation_rules(self):
        for override in ("n_points=7", "nu=0", "tau=-1", "n_max=99", "initial_condition=x"):
            with pytest.raises(ConfigError):
                load_config(None, [override])


class TestInitialStates:
    def test_kinds(self):
        for kind in cli.INITIAL_CONDITIONS:
            u = build_initial_state(
                ExperimentConfig(initial_condition=kind, n_points=16)
            )
            assert u.n_points == 16

    def test_random_is_seed_deterministic(self):
        a = build_initial_state(ExperimentConfig(seed=5))
        b = build_initial_state(ExperimentConfig(seed=5))
        c = build_initial_state(ExperimentConfig(seed=6))
        assert np.array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    def test_random_hits_requested_size(self):
        u = build_initial_state(ExperimentConfig(amplitude=2.5))
        assert abs(l2_norm(u) - 2.5) < 1e-12

    def test_zero_amplitude(self):
        u = build_initial_state(ExperimentConfig(amplitude=0.0))
        assert l2_norm(u) == 0.0


class TestSimulate:
    def test_csv_and_determinism(self, tmp_path):
        out = tmp_path / "run"
        args = [
            "--set", f"output_path={out}",
            "--set", "n_points=16", "--set", "t_end=0.2", "--set", "n_max=2",
            "simulate",
        ]
        assert main(args) == EXIT_OK
        first = out.with_suffix(".csv").read_bytes()
        assert main(args) == EXIT_OK
        assert out.with_suffix(".csv").read_bytes() == first  # byte-identical

        header, data = read_csv(out.with_suffix(".csv"))
        assert header[:3] == ["t", "l2", "hamiltonian"]
        # E_1 = 2 pi H holds row by row in the output
        e1 = data[:, header.index("energy_1")]
        h = data[:, header.index("hamiltonian")]
        np.testing.assert_allclose(e1, 2.0 * np.pi * h, rtol=1e-11)
        # L2 is conserved by the splitting
        np.testing.assert_allclose(data[:, 1], data[0, 1], rtol=1e-12)

    def test_zero_amplitude_run(self, tmp_path):
        out = tmp_path / "zero"
        assert (
            main(
                [
                    "--set", f"output_path={out}",
                    "--set", "amplitude=0", "--set", "n_points=16",
                    "--set", "t_end=0.05", "--set", "n_max=1",
                    "simulate",
                ]
            )
            == EXIT_OK
        )
        _, data = read_csv(out.with_suffix(".csv"))
        assert np.all(data[:, 1:] == 0.0)

    def test_seed_flag_overrides(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        base = ["--set", "n_points=16", "--set", "t_end=0.05", "--set", "n_max=1"]
        main(base + ["--set", f"output_path={out_a}", "--seed", "1", "simulate"])
        main(base + ["--set", f"output_path={out_b}", "--seed", "2", "simulate"])
        _, a = read_csv(out_a.with_suffix(".csv"))
        _, b = read_csv(out_b.with_suffix(".csv"))
        assert not np.array_equal(a, b)


class TestCheckIdentities:
    def test_passes(self, tmp_path):
        out = tmp_path / "ids"
        code = main(
            ["--set", f"output_path={out}", "--set", "n_points=16", "check-identities"]
        )
        assert code == EXIT_OK
        report = out.with_suffix(".identities.txt").read_text()
        assert "pass" in report and "FAIL" not in report

    def test_injected_error_fails(self, tmp_path):
        out = tmp_path / "ids_bad"
        code = main(
            [
                "--set", f"output_path={out}", "--set", "n_points=16",
                "check-identities", "--inject-error",
            ]
        )
        assert code == EXIT_IDENTITY
        assert "FAIL" in out.with_suffix(".identities.txt").read_text()

    def test_budget_refusal(self):
        code = main(["--set", "n_points=64", "check-identities"])
        assert code == EXIT_CONFIG


class TestCheckBounds:
    def test_runs_and_writes_reports(self, tmp_path):
        out = tmp_path / "bounds"
        code = main(
            [
                "--set", f"output_path={out}",
                "--set", "n_points=16", "--set", "t_end=0.5",
                "--set", "n_max=2", "--set", "record_every=20",
                "check-bounds",
            ]
        )
        assert code == EXIT_OK
        summary = (tmp_path / "bounds.bounds.txt").read_text()
        assert "gagliardo_nirenberg = pass" in summary
        assert "holder_interpolation = pass" in summary
        assert "scaling_invariance = pass" in summary
        for n in (1, 2):
            assert (tmp_path / f"bounds.bounds_n{n}.csv").exists()


class TestExitCodes:
    def test_config_error_from_cli(self):
        assert main(["--set", "n_points=7", "simulate"]) == EXIT_CONFIG

    def test_missing_config_file(self):
        assert main(["--config", "/nonexistent.cfg", "simulate"]) == EXIT_CONFIG


@pytest.mark.skipif(
    not pytest.importorskip("matplotlib", reason="plots are optional"),
    reason="matplotlib missing",
)
def test_svg_output(tmp_path):
    out = tmp_path / "plot"
    code = main(
        [
            "--set", f"output_path={out}",
            "--set", "n_points=16", "--set", "t_end=0.05", "--set", "n_max=1",
            "--svg", "simulate",
        ]
    )
    assert code == EXIT_OK
    assert out.with_suffix(".svg").exists()
