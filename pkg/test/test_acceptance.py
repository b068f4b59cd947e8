"""End-to-end checks of the simulator against the model numbers of the fiber feed-forward experiment."""
import unittest

import numpy as np

from app.feedforward.budget import default_loss_components, loss_budget, timing_report
from app.feedforward.compensation import random_fiber_unitary, simulate_compensation
from app.feedforward.models import FeedForwardImperfections, SwitchModel, TimingBudget
from app.feedforward.protocol import correction_from_waveplates, correction_unitary
from app.montecarlo.errorbar import tomography_errorbar
from app.montecarlo.sweep import SweepSpec, feedforward_fidelity, sweep_bloch
from app.optics.metrics import equal_up_to_phase, phase_distance, trace_distance
from app.optics.states import DensityMatrix, PSI_MINUS
from app.source.model import SourceModel, make_state, werner_singlet
from app.tomography.counts import probabilities_from_state
from app.tomography.reconstruction import ls_reconstruct
from app.tomography.suites import suite_for
from app.utils.enums import Plane, SourceMode

IDEAL = SourceModel(mode=SourceMode.IDEAL)


def _random_state(rng: np.random.Generator, dim: int, rank: int) -> DensityMatrix:
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    return DensityMatrix.from_operator(g @ g.conj().T)


class IdealProtocolTest(unittest.TestCase):

    def test_feedforward_prepares_every_target(self):
        for plane in Plane:
            result = sweep_bloch(SweepSpec(plane=plane, source=IDEAL, infinite_statistics=True))
            self.assertEqual(len(result.points), 19)
            np.testing.assert_allclose(result.fidelities, np.ones(19), atol=1e-9)

    def test_without_feedforward_half_the_shots_are_wrong(self):
        for plane in Plane:
            exact = sweep_bloch(SweepSpec(plane=plane, source=IDEAL, feedforward=False, infinite_statistics=True))
            np.testing.assert_allclose(exact.fidelities, np.full(19, 0.5), atol=1e-9)
            sampled = sweep_bloch(SweepSpec(plane=plane, source=IDEAL, feedforward=False,
                                            counts_per_setting=35_000, seed=11))
            inside = np.abs(sampled.fidelities - 0.49) <= 0.02
            self.assertGreaterEqual(inside.mean(), 0.9)


class ImperfectSourceTest(unittest.TestCase):

    def test_meridian_plane(self):
        result = sweep_bloch(SweepSpec(plane=Plane.MERIDIAN, source=SourceModel.measured_meridian(),
                                       infinite_statistics=True))
        self.assertAlmostEqual(result.mean_fidelity, 0.92, delta=0.02)
        self.assertGreaterEqual(result.fidelities.max() - result.fidelities.min(), 0.02)

    def test_equatorial_plane(self):
        result = sweep_bloch(SweepSpec(plane=Plane.EQUATORIAL, source=SourceModel.measured_equatorial(),
                                       infinite_statistics=True))
        self.assertAlmostEqual(result.mean_fidelity, 0.91, delta=0.02)

    def test_feedforward_path_alone(self):
        imperfections = FeedForwardImperfections(miscalibration_deg=0.5, pdl_fraction=0.01, chi_signal=0.2)
        for plane, source in ((Plane.MERIDIAN, SourceModel.measured_meridian()),
                              (Plane.EQUATORIAL, SourceModel.measured_equatorial())):
            result = feedforward_fidelity(plane, source=source, imperfections=imperfections)
            self.assertGreaterEqual(result.mean, 0.985, plane)
            self.assertLess(result.mean, 1.0, plane)


class TomographyOracleTest(unittest.TestCase):

    def test_exact_probabilities_reconstruct_the_state(self):
        rng = np.random.default_rng(2024)
        for dim in (2, 4):
            suite = suite_for(dim)
            for index in range(100):
                rho = _random_state(rng, dim, rank=1 + index % dim)
                result = ls_reconstruct(suite, probabilities_from_state(rho, suite), dim)
                self.assertLess(trace_distance(result.rho, rho), 1e-6, (dim, index))


class ErrorBarTest(unittest.TestCase):

    def test_singlet_fidelity_spread(self):
        rho = make_state(IDEAL)
        fid, _ = tomography_errorbar(rho, 40_000, 0.5, 100, seed=5)
        counts_only, _ = tomography_errorbar(rho, 40_000, 0.0, 100, seed=5)
        # count noise alone leaves the singlet spread well under 1e-3
        self.assertLess(counts_only.sigma, 1e-3)
        self.assertGreater(fid.sigma, 1.5 * counts_only.sigma)
        self.assertLess(fid.sigma, 0.02)
        self.assertGreater(fid.mean, 0.98)

    def test_measured_source_fidelity_spread(self):
        rho = make_state(SourceModel.measured_meridian())
        fid, _ = tomography_errorbar(rho, 40_000, 0.5, 100, seed=5, target=PSI_MINUS)
        self.assertGreaterEqual(fid.sigma, 0.005)
        self.assertLessEqual(fid.sigma, 0.02)

    def test_spread_scales_with_counts(self):
        rho = werner_singlet(0.5)
        counts = np.array([2_000, 6_325, 20_000])
        sigmas = [tomography_errorbar(rho, int(n), 0.0, 150, seed=21)[0].sigma for n in counts]
        slope = np.polyfit(np.log(counts), np.log(sigmas), 1)[0]
        self.assertAlmostEqual(slope, -0.5, delta=0.1)


class HardwareModelTest(unittest.TestCase):

    def test_correction_waveplates(self):
        for plane in Plane:
            self.assertTrue(equal_up_to_phase(correction_from_waveplates(plane), correction_unitary(plane), tol=1e-12))

    def test_timing_and_loss(self):
        report = timing_report(TimingBudget(), SwitchModel())
        self.assertEqual(report.latency_ns, 560.0)
        self.assertTrue(780.0 <= report.photon_delay_ns <= 820.0)
        self.assertTrue(report.feasible)
        self.assertGreater(report.slack_ns, 0.0)
        self.assertEqual(report.max_herald_rate_hz, 1.0e6)
        self.assertAlmostEqual(loss_budget(default_loss_components()).total_db, 3.0, delta=0.5)

    def test_fiber_compensation(self):
        for seed in range(50):
            fiber = random_fiber_unitary(seed)
            report = simulate_compensation(fiber, seed)
            self.assertTrue(report.converged, seed)
            self.assertLess(report.residual_infidelity, 1e-3)
            self.assertLess(phase_distance(report.compensation @ fiber, np.eye(2)), 2e-2, seed)


if __name__ == '__main__':
    unittest.main()
