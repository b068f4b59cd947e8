import unittest

import numpy as np
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose
from pydantic import ValidationError

from app.optics.metrics import concurrence, fidelity_pure, purity
from app.optics.jones import PAULI_Z
from app.optics.projection import local_operator, project_arm
from app.optics.states import A, DensityMatrix, PSI_MINUS
from app.source.model import (
    MEASURED_PURITY, SourceModel, apply_birefringence, apply_pdl, dephase_singlet, make_state,
    visibility_for_purity, werner_singlet,
)
from app.utils.enums import Arm, SourceMode
from app.utils.logging import logger

unit = st.floats(min_value=0.0, max_value=1.0)


class StateFamilyTest(unittest.TestCase):

    def test_full_visibility_is_the_singlet(self):
        singlet = DensityMatrix.from_pure(PSI_MINUS)
        self.assertTrue(dephase_singlet(1.0).isclose(singlet))
        self.assertTrue(werner_singlet(1.0).isclose(singlet))

    @given(unit)
    def test_dephased_purity(self, v):
        self.assertAlmostEqual(purity(dephase_singlet(v)), (1 + v ** 2) / 2, places=12)

    @given(unit)
    def test_werner_purity(self, v):
        self.assertAlmostEqual(purity(werner_singlet(v)), (1 + 3 * v ** 2) / 4, places=12)

    @given(st.floats(min_value=0.5, max_value=1.0))
    def test_visibility_inverts_dephased_purity(self, p):
        self.assertAlmostEqual(purity(dephase_singlet(visibility_for_purity(p))), p, places=10)

    def test_measured_purity_sets_visibility(self):
        v = visibility_for_purity(MEASURED_PURITY)
        self.assertAlmostEqual(v, np.sqrt(0.78), places=12)
        self.assertAlmostEqual(v, 0.883176, places=6)
        self.assertAlmostEqual(visibility_for_purity(0.89, SourceMode.WERNER), np.sqrt(2.56 / 3), places=12)

    @given(unit)
    def test_dephased_fidelity_closed_form(self, v):
        self.assertAlmostEqual(fidelity_pure(dephase_singlet(v), PSI_MINUS), (1 + v) / 2, places=12)

    @given(unit)
    def test_werner_fidelity_closed_form(self, v):
        self.assertAlmostEqual(fidelity_pure(werner_singlet(v), PSI_MINUS), (1 + 3 * v) / 4, places=12)

    def test_werner_without_visibility_is_fully_mixed(self):
        assert_allclose(werner_singlet(0.0).matrix, np.eye(4) / 4, atol=1e-14)
        assert_allclose(make_state(SourceModel(mode=SourceMode.WERNER, visibility=0.0)).matrix, np.eye(4) / 4,
                        atol=1e-14)

    def test_out_of_range_purity(self):
        with self.assertRaises(ValueError):
            visibility_for_purity(0.4)
        with self.assertRaises(ValueError):
            visibility_for_purity(0.2, SourceMode.WERNER)
        with self.assertRaises(ValueError):
            dephase_singlet(1.2)

    def test_dephased_concurrence_equals_visibility(self):
        self.assertAlmostEqual(concurrence(dephase_singlet(0.6)), 0.6, places=10)


class ChannelTest(unittest.TestCase):

    def setUp(self):
        self.singlet = DensityMatrix.from_pure(PSI_MINUS)

    def test_signal_birefringence_lowers_singlet_fidelity(self):
        rho = apply_birefringence(self.singlet, 0.5, Arm.SIGNAL)
        self.assertAlmostEqual(fidelity_pure(rho, PSI_MINUS), np.cos(0.25) ** 2, places=12)
        self.assertAlmostEqual(fidelity_pure(rho, PSI_MINUS), 0.938791, places=6)
        self.assertAlmostEqual(purity(rho), 1.0, places=12)

    def test_equal_birefringence_on_both_arms_cancels(self):
        rho = apply_birefringence(apply_birefringence(self.singlet, 0.3, Arm.IDLER), 0.3, Arm.SIGNAL)
        self.assertAlmostEqual(fidelity_pure(rho, PSI_MINUS), 1.0, places=12)

    def test_full_turn_leaves_the_state_unchanged(self):
        rho = dephase_singlet(0.7)
        for arm in Arm:
            assert_allclose(apply_birefringence(rho, 2 * np.pi, arm).matrix, rho.matrix, atol=1e-12)

    @given(unit, st.floats(min_value=-np.pi, max_value=np.pi))
    def test_equal_phases_on_opposite_arms_commute_with_dephasing(self, v, chi):
        flip = local_operator(PAULI_Z, Arm.IDLER)

        def dephase(rho: DensityMatrix) -> DensityMatrix:
            p = (1 + v) / 2
            return DensityMatrix.from_operator(p * rho.matrix + (1 - p) * flip @ rho.matrix @ flip)

        def rotate(rho: DensityMatrix) -> DensityMatrix:
            return apply_birefringence(apply_birefringence(rho, chi, Arm.IDLER), chi, Arm.SIGNAL)

        rotated_first = dephase(rotate(self.singlet))
        dephased_first = rotate(dephase(self.singlet))
        assert_allclose(rotated_first.matrix, dephased_first.matrix, atol=1e-12)
        assert_allclose(dephased_first.matrix, dephase_singlet(v).matrix, atol=1e-12)

    def test_pdl_biases_toward_h(self):
        rho = apply_pdl(self.singlet, 0.01, Arm.SIGNAL)
        self.assertAlmostEqual(np.trace(rho.matrix).real, 1.0, places=12)
        # heralding A on the idler leaves D on the signal, then PDL skews it
        signal = project_arm(rho, Arm.IDLER, A).require_state()
        self.assertAlmostEqual(signal.matrix[0, 0].real, 1 / 1.99, places=10)
        self.assertAlmostEqual(signal.matrix[0, 0].real, 0.502513, places=6)

    def test_pdl_range(self):
        with self.assertRaises(ValueError):
            apply_pdl(self.singlet, 1.0)
        self.assertIs(apply_pdl(self.singlet, 0.0), self.singlet)


class SourceModelTest(unittest.TestCase):

    def test_defaults(self):
        model = SourceModel()
        self.assertIs(model.mode, SourceMode.DEPHASED)
        self.assertEqual(model.visibility, 1.0)
        self.assertIsNone(model.leak_probability)

    def test_purity_resolves_visibility(self):
        model = SourceModel(purity=0.89)
        self.assertAlmostEqual(model.visibility, np.sqrt(0.78), places=12)
        self.assertAlmostEqual(purity(make_state(model)), 0.89, places=12)

    def test_contradicting_purity_and_visibility(self):
        with self.assertRaises(ValidationError):
            SourceModel(purity=0.89, visibility=0.5)

    def test_unknown_field_is_rejected(self):
        with self.assertRaises(ValidationError):
            SourceModel(purityy=0.9)

    def test_ideal_mode_forces_perfection(self):
        with self.assertLogs(logger, level="WARNING"):
            model = SourceModel(mode=SourceMode.IDEAL, chi_signal=0.4, visibility=0.5)
        self.assertEqual(model.visibility, 1.0)
        self.assertEqual(model.chi_signal, 0.0)
        self.assertEqual(model.leak_probability, 0.0)
        self.assertAlmostEqual(fidelity_pure(make_state(model), PSI_MINUS), 1.0, places=12)

    def test_measured_presets(self):
        meridian = SourceModel.measured_meridian()
        equatorial = SourceModel.measured_equatorial()
        self.assertEqual(meridian.chi_signal, 0.5)
        self.assertEqual(equatorial.chi_signal, 0.25)
        for model in (meridian, equatorial):
            rho = make_state(model)
            self.assertAlmostEqual(np.trace(rho.matrix).real, 1.0, places=12)
            self.assertAlmostEqual(purity(rho), 0.89, delta=0.005)

    @settings(max_examples=60, deadline=None)
    @given(
        st.sampled_from([SourceMode.DEPHASED, SourceMode.WERNER]),
        unit,
        st.floats(min_value=-2 * np.pi, max_value=2 * np.pi),
        st.floats(min_value=-2 * np.pi, max_value=2 * np.pi),
        st.floats(min_value=0.0, max_value=0.99),
        st.sampled_from(list(Arm)),
    )
    def test_any_model_gives_a_density_matrix(self, mode, v, chi_signal, chi_idler, pdl, pdl_arm):
        model = SourceModel(mode=mode, visibility=v, chi_signal=chi_signal, chi_idler=chi_idler,
                            pdl_fraction=pdl, pdl_arm=pdl_arm)
        rho = make_state(model)
        self.assertEqual(rho.dim, 4)
        self.assertAlmostEqual(np.trace(rho.matrix).real, 1.0, places=10)
        assert_allclose(rho.matrix, rho.matrix.conj().T, atol=1e-12)
        self.assertGreaterEqual(np.linalg.eigvalsh(rho.matrix).min(), -1e-10)
        self.assertLessEqual(purity(rho), 1.0 + 1e-10)

    def test_werner_source(self):
        rho = make_state(SourceModel(mode=SourceMode.WERNER, visibility=0.5))
        assert_allclose(np.linalg.eigvalsh(rho.matrix), [0.125, 0.125, 0.125, 0.625], atol=1e-12)


if __name__ == '__main__':
    unittest.main()
