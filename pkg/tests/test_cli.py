"""
CLI tests

Verifies:
1. Exit codes for success, failed hypotheses and configuration errors
2. Output files of solve, continue and bubble-scan
3. Reproducible summaries for a fixed seed
"""

import pytest

from src.cli import EXIT_CONFIG, EXIT_HYPOTHESIS, EXIT_OK, _oracle_rows, build_parser, main
from src.core.errors import ConfigError
from src.core.utils import get_project_root, read_csv
from src.numerics import AVAILABLE_EXPERIMENTS
from src.numerics.pipeline import Pipeline

RUNS = get_project_root() / "config" / "runs"

SMALL_ANNULUS = """
manifold:
  n: 3
  r_min: 1.0
  r_max: 2.0
boundary:
  phi: [1.0, -1.0]
solver:
  mesh_elements: 40
  tol: 1.0e-8
  restarts: 1
  seed: 5
"""

SMALL_BALL = """
manifold:
  n: 5
coefficients:
  b: [-1.0]
solver:
  mesh_elements: 40
"""


@pytest.fixture
def annulus_config(tmp_path):
    path = tmp_path / "annulus.yaml"
    path.write_text(SMALL_ANNULUS, encoding="utf-8")
    return path


class TestOracle:
    """Reference values"""

    def test_aubin_rows(self):
        """I_6^3 = 1/20 in closed form and by quadrature"""
        rows = _oracle_rows("aubin", ["6", "3"])
        assert rows[0][1] == pytest.approx(0.05, rel=1e-13)
        assert rows[1][1] == pytest.approx(0.05, rel=1e-8)

    def test_critical(self):
        """2#(4) = 4"""
        assert _oracle_rows("critical", ["4"]) == [("2#(4)", 4.0)]

    def test_malformed_arguments(self):
        """Missing or non-numeric arguments are configuration errors"""
        with pytest.raises(ConfigError):
            _oracle_rows("k0", [])
        with pytest.raises(ConfigError):
            _oracle_rows("omega", ["five"])

    def test_exit_codes(self):
        """0 for valid input, 64 for malformed arguments"""
        assert main(["oracle", "aubin", "6", "3"]) == EXIT_OK
        assert main(["oracle", "k0"]) == EXIT_CONFIG


class TestCommands:
    """check, solve, continue, bubble-scan and list"""

    def test_list(self):
        """list shows the registry"""
        assert main(["list"]) == EXIT_OK

    def test_registry_names_pipeline_methods(self):
        """Each experiment is dispatched to an existing Pipeline method"""
        for info in AVAILABLE_EXPERIMENTS.values():
            assert callable(getattr(Pipeline, info["method"]))

    def test_parser_has_registry_commands(self):
        """Every registered experiment is a subcommand"""
        args = build_parser().parse_args(["bubble-scan", "--config", "x.yaml", "--gap-threshold", "0.1"])
        assert args.command == "bubble-scan"
        assert args.gap_threshold == 0.1

    def test_check_passes(self, tmp_path):
        """Flat n = 5 ball with b = -1 satisfies every hypothesis"""
        assert main(["check", "--config", str(RUNS / "flat_n5_ball.yaml"), "--out", str(tmp_path)]) == EXIT_OK

    def test_check_degenerate(self, tmp_path):
        """H(x0) = 0 fails the condition"""
        assert main(["check", "--config", str(RUNS / "degenerate.yaml"), "--out", str(tmp_path)]) == EXIT_HYPOTHESIS

    def test_malformed_config(self, tmp_path):
        """Unknown keys exit with 64"""
        path = tmp_path / "bad.yaml"
        path.write_text("manifold:\n  n: 5\n  radius: 1.0\n", encoding="utf-8")
        assert main(["check", "--config", str(path), "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_solve_writes_outputs(self, annulus_config, tmp_path):
        """Solve on an annulus reports a sign change"""
        out = tmp_path / "solve"
        assert main(["solve", "--config", str(annulus_config), "--out", str(out)]) == EXIT_OK
        summary = (out / "solve_summary.txt").read_text(encoding="utf-8")
        assert "sign_changes = true" in summary
        assert summary.startswith("# manifold:")
        header, data = read_csv(out / "solve_solution.csv")
        assert header == ["r", "w", "h", "u"]
        assert data.shape == (41, 4)
        assert (out / "solve_trace.csv").exists()

    def test_solve_is_reproducible(self, annulus_config, tmp_path):
        """Same configuration and seed give byte-identical summaries"""
        first, second = tmp_path / "first", tmp_path / "second"
        for out in (first, second):
            assert main(["solve", "--config", str(annulus_config), "--out", str(out), "--jobs", "2"]) == EXIT_OK
        for name in ("solve_summary.txt", "solve_solution.csv"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_bubble_scan(self, tmp_path):
        """n = 5 scan writes one row per eps and passes its threshold"""
        assert main(["bubble-scan", "--config", str(RUNS / "bubble_n5.yaml"), "--out", str(tmp_path)]) == EXIT_OK
        header, data = read_csv(tmp_path / "bubble_scan.csv")
        assert header == ["eps", "mu_eps", "gamma_eps", "Q_eps"]
        assert data.shape == (5, 4)
        report = (tmp_path / "bubble_report.txt").read_text(encoding="utf-8")
        assert "passed = true" in report
        assert "supported_reading = derived" in report

    def test_bubble_scan_degenerate(self, tmp_path):
        """A vanishing H(x0) is reported instead of a relative gap"""
        assert main(["bubble-scan", "--config", str(RUNS / "degenerate.yaml"), "--out", str(tmp_path)]) == EXIT_OK
        report = (tmp_path / "bubble_report.txt").read_text(encoding="utf-8")
        assert "relative_gap = degenerate: coefficient below noise floor" in report

    def test_continue_writes_outputs(self, tmp_path):
        """Default schedule on a coarse n = 5 ball: one row per exponent"""
        config = tmp_path / "ball.yaml"
        config.write_text(SMALL_BALL, encoding="utf-8")
        out = tmp_path / "continue"
        assert main(["continue", "--config", str(config), "--out", str(out)]) == EXIT_OK
        header, data = read_csv(out / "continuation.csv")
        assert header == ["q", "mu", "lambda", "residual"]
        assert data.shape == (6, 4)
        assert data[-1, 0] == pytest.approx(10.0 / 3.0, rel=1e-15)
        assert (data[:, 3] <= 1e-9).all()
        summary = (out / "continuation_summary.txt").read_text(encoding="utf-8")
        assert "lambda_positive = true" in summary
        assert "steps = 6" in summary

    @pytest.mark.parametrize("solver", [
        "q: 7.0",
        "q_schedule: [3.0, 2.9, 3.3333333333333335]",
        "q_schedule: [3.0, 3.2]",
    ])
    def test_exponents_checked_before_solving(self, tmp_path, solver):
        """Exponents outside (2, 2#] or a bad schedule are configuration errors"""
        config = tmp_path / "bad.yaml"
        config.write_text(SMALL_BALL + f"  {solver}\n", encoding="utf-8")
        assert main(["continue", "--config", str(config), "--out", str(tmp_path)]) == EXIT_CONFIG
