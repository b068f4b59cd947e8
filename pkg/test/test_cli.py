import io
import json
import tempfile
import unittest
from argparse import Namespace
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from unittest import mock

from app.cli.config import load_config, load_config_text
from app.cli.main import main
from app.utils.enums import ExitCode, Plane, SourceMode
from app.utils.exceptions import ConfigError, SimulationError
from app.utils.logging import logger
from app.utils.processor_base import ProcessorBase


class CliTestCase(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def run_cli(self, *argv: str) -> tuple[int, str, str]:
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = main(list(argv))
        return code, out.getvalue(), err.getvalue()

    def write(self, name: str, text: str) -> Path:
        path = self.dir / name
        path.write_text(text, encoding="utf-8")
        return path


class ConfigTest(CliTestCase):

    def test_defaults(self):
        config = load_config(None)
        self.assertIs(config.source.mode, SourceMode.DEPHASED)
        self.assertEqual(config.switch.isolation_db, 20.0)
        self.assertEqual(config.timing.delay_fiber_m, 162.0)
        self.assertAlmostEqual(sum(component.db for component in config.loss), 3.3)

    def test_ini_sections(self):
        config = load_config_text(
            "[source]\n"
            "purity = 0.89\n"
            "pdl_fraction = 0.01\n"
            "chi_signal = 0.5\n"
            "\n"
            "[sweep]\n"
            "plane = equatorial\n"
            "n_points = 7\n"
            "infinite_statistics = true\n"
            "\n"
            "[loss]\n"
            "fiber = 0.4\n"
            "\n"
            "[output]\n"
            "output_dir = results\n"
        )
        self.assertAlmostEqual(config.source.visibility, 0.78 ** 0.5, places=12)
        self.assertIs(config.sweep.plane, Plane.EQUATORIAL)
        self.assertEqual(config.sweep.n_points, 7)
        self.assertTrue(config.sweep.infinite_statistics)
        self.assertEqual(config.sweep.source, config.source)
        self.assertEqual([(c.name, c.db) for c in config.loss], [("fiber", 0.4)])
        self.assertEqual(config.output_dir, Path("results"))

    def test_unknown_key_names_key_and_line(self):
        with self.assertRaises(ConfigError) as ctx:
            load_config_text("[source]\nmode = dephased\npurityy = 0.9\n")
        self.assertEqual(ctx.exception.key, "purityy")
        self.assertEqual(ctx.exception.line, 3)
        self.assertEqual(str(ctx.exception), "unknown key 'purityy' in [source] (line 3)")

    def test_invalid_value(self):
        with self.assertRaises(ConfigError) as ctx:
            load_config_text("[timing]\n\ngate_duration_ns = -5\n")
        self.assertEqual(ctx.exception.line, 3)
        self.assertIn("gate_duration_ns", str(ctx.exception))

    def test_unknown_section(self):
        with self.assertRaisesRegex(ConfigError, r"unknown section \[detector\]"):
            load_config_text("[detector]\nefficiency = 0.8\n")

    def test_key_outside_section(self):
        with self.assertRaises(ConfigError) as ctx:
            load_config_text("purity = 0.9\n")
        self.assertEqual(ctx.exception.line, 1)

    def test_json_config(self):
        path = self.write("exp.json", json.dumps({
            "source": {"mode": "ideal"},
            "switch": {"isolation_db": 30},
            "output_dir": "elsewhere",
        }, indent=2))
        config = load_config(path)
        self.assertIs(config.source.mode, SourceMode.IDEAL)
        self.assertAlmostEqual(config.switch.leak_probability, 0.001)
        self.assertEqual(config.output_dir, Path("elsewhere"))

    def test_json_unknown_key_line(self):
        text = '{\n  "switch": {\n    "isolation_db": 30,\n    "speed": 1\n  }\n}\n'
        with self.assertRaises(ConfigError) as ctx:
            load_config_text(text, "json")
        self.assertEqual(ctx.exception.line, 4)

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            load_config(self.dir / "absent.ini")


class SweepCommandTest(CliTestCase):

    def test_ideal_sweep_prints_unit_fidelity(self):
        config = self.write("ideal.ini", "[source]\nmode = ideal\n\n[sweep]\nn_points = 5\n")
        code, out, _ = self.run_cli("sweep", "--config", str(config), "--seed", "1",
                                    "--out", str(self.dir / "out"), "--infinite-statistics")
        self.assertEqual(code, ExitCode.SUCCESS)
        self.assertIn("sweep meridian ff-on: 5 points", out)
        self.assertIn("fidelity mean 1.000000", out)
        self.assertTrue((self.dir / "out" / "sweep_meridian_ff-on.csv").exists())
        self.assertTrue((self.dir / "out" / "sweep_meridian_ff-on.json").exists())

    def test_flags_override_config(self):
        config = self.write("ideal.ini", "[source]\nmode = ideal\n\n[sweep]\nn_points = 3\n")
        code, out, _ = self.run_cli("sweep", "--config", str(config), "--seed", "1", "--out", str(self.dir),
                                    "--plane", "equatorial", "--feedforward", "off", "--infinite-statistics")
        self.assertEqual(code, ExitCode.SUCCESS)
        self.assertIn("fidelity mean 0.500000", out)
        self.assertTrue((self.dir / "sweep_equatorial_ff-off.csv").exists())

    def test_seed_is_required_outside_a_terminal(self):
        with mock.patch("sys.stdin", io.StringIO()):
            code, out, err = self.run_cli("sweep", "--out", str(self.dir))
        self.assertEqual(code, ExitCode.CONFIG_ERROR)
        self.assertIn("config error: --seed is required", err)
        self.assertEqual(out, "")

    def test_config_error_exit_code(self):
        config = self.write("bad.ini", "[source]\npurityy = 0.9\n")
        code, _, err = self.run_cli("sweep", "--config", str(config), "--seed", "1")
        self.assertEqual(code, ExitCode.CONFIG_ERROR)
        self.assertIn("unknown key 'purityy' in [source] (line 2)", err)

    def test_usage_errors_exit_with_config_code(self):
        code, _, err = self.run_cli("sweep", "--plane", "polar")
        self.assertEqual(code, ExitCode.CONFIG_ERROR)
        self.assertIn("config error", err)
        code, _, _ = self.run_cli("teleport")
        self.assertEqual(code, ExitCode.CONFIG_ERROR)


class TimingCommandTest(CliTestCase):

    def test_default_budget_is_feasible(self):
        code, out, _ = self.run_cli("timing")
        self.assertEqual(code, ExitCode.SUCCESS)
        self.assertRegex(out, r"latency_ns\s+560\.000000")
        self.assertIn("FEASIBLE", out)
        self.assertNotIn("INFEASIBLE", out)
        self.assertIn("total 3.300000 dB", out)

    def test_json_output(self):
        code, out, _ = self.run_cli("timing", "--format", "json")
        self.assertEqual(code, ExitCode.SUCCESS)
        payload = json.loads(out)
        self.assertEqual(payload["timing"]["latency_ns"], 560.0)
        self.assertTrue(payload["timing"]["feasible"])
        self.assertEqual(len(payload["loss"]["components"]), 3)

    def test_infeasible_budget_has_its_own_exit_code(self):
        config = self.write("short.ini", "[timing]\ndelay_fiber_m = 100\n")
        code, out, _ = self.run_cli("timing", "--config", str(config))
        self.assertEqual(code, ExitCode.INFEASIBLE)
        self.assertIn("INFEASIBLE", out)
        self.assertIn("reason: trigger arrives", out)


class TomographyCommandTest(CliTestCase):

    def test_exact_singlet_counts(self):
        counts = self.dir / "singlet.csv"
        code, out, _ = self.run_cli("simulate-counts", "--state", "psi-minus", "--dim", "4",
                                    "--counts", "40000", "--exact", "--seed", "0", "--out", str(counts))
        self.assertEqual(code, ExitCode.SUCCESS)
        self.assertIn("wrote 9 settings", out)
        report_path = self.dir / "rho.json"
        code, out, _ = self.run_cli("tomo", str(counts), "--out", str(report_path))
        self.assertEqual(code, ExitCode.SUCCESS)
        self.assertIn("tomography (4-dimensional, 9 settings)", out)
        self.assertRegex(out, r"fidelity\s+1\.000000")
        self.assertRegex(out, r"concurrence\s+1\.000000")
        report = json.loads(report_path.read_text(encoding="utf-8"))
        self.assertAlmostEqual(report["fidelity"], 1.0, places=9)
        self.assertEqual(report["rho"]["dim"], 4)

    def test_sampled_single_photon_counts(self):
        counts = self.dir / "d.csv"
        code, _, _ = self.run_cli("simulate-counts", "--state", "D", "--dim", "2", "--counts", "50000",
                                  "--seed", "4", "--out", str(counts))
        self.assertEqual(code, ExitCode.SUCCESS)
        code, out, _ = self.run_cli("tomo", str(counts), "--target", "D")
        self.assertEqual(code, ExitCode.SUCCESS)
        self.assertRegex(out, r"target\s+D\n")
        self.assertNotIn("concurrence", out)

    def test_incomplete_counts_fail_at_runtime(self):
        counts = self.dir / "partial.csv"
        self.run_cli("simulate-counts", "--dim", "2", "--state", "H", "--settings", "2", "--exact",
                     "--seed", "0", "--out", str(counts))
        code, _, err = self.run_cli("tomo", str(counts))
        self.assertEqual(code, ExitCode.RUNTIME_ERROR)
        self.assertIn("not informationally complete", err)

    def test_wrong_target_dimension(self):
        counts = self.dir / "singlet.csv"
        self.run_cli("simulate-counts", "--exact", "--seed", "0", "--out", str(counts))
        code, _, err = self.run_cli("tomo", str(counts), "--target", "D")
        self.assertEqual(code, ExitCode.CONFIG_ERROR)
        self.assertIn("not a two-photon state", err)

    def test_missing_count_file(self):
        code, _, err = self.run_cli("tomo", str(self.dir / "absent.csv"))
        self.assertEqual(code, ExitCode.RUNTIME_ERROR)
        self.assertIn("error:", err)


class CompensateCommandTest(CliTestCase):

    def test_compensation_report(self):
        code, out, _ = self.run_cli("compensate", "--seed", "3")
        self.assertEqual(code, ExitCode.SUCCESS)
        self.assertIn("fiber compensation (seed 3)", out)
        self.assertRegex(out, r"converged\s+yes")

    def test_iteration_cap_is_a_runtime_failure(self):
        code, out, _ = self.run_cli("compensate", "--seed", "3", "--max-iterations", "0")
        self.assertEqual(code, ExitCode.RUNTIME_ERROR)
        self.assertRegex(out, r"converged\s+no")


class _Echo(ProcessorBase):

    def __init__(self, error: Exception | None = None):
        self.error = error

    def _process(self, args: Namespace) -> ExitCode:
        if self.error is not None:
            raise self.error
        return ExitCode.INFEASIBLE


class ProcessorBaseTest(unittest.TestCase):

    def test_result_is_returned_and_logged(self):
        with self.assertLogs(logger, level="INFO") as logs:
            code = _Echo().process(Namespace())
        self.assertEqual(code, 3)
        self.assertIn("_Echo started processing", logs.output[0])
        self.assertIn("with exit code 3", logs.output[-1])

    def test_failures_map_to_exit_codes(self):
        cases = (
            (ConfigError("bad key", line=2), ExitCode.CONFIG_ERROR, "config error: bad key (line 2)"),
            (SimulationError("no light"), ExitCode.RUNTIME_ERROR, "error: no light"),
            (OSError("disk full"), ExitCode.RUNTIME_ERROR, "error: disk full"),
        )
        for error, expected, message in cases:
            err = io.StringIO()
            with redirect_stderr(err), self.assertLogs(logger, level="ERROR"):
                code = _Echo(error).process(Namespace())
            self.assertEqual(code, expected)
            self.assertIn(message, err.getvalue())


if __name__ == '__main__':
    unittest.main()
