"""Heralded remote state preparation with switch-based feed-forward.

The idler is measured by the PM station. A transmitted idler fires the trigger and
the switches route the signal through U_B (cross state); a reflected idler leaves the
switches in the bar state and the signal passes U_A. Switch crosstalk sends a
fraction `leak` of the signal through the other path, modeled as an incoherent mixture.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from app.feedforward.models import PmSetting, SwitchModel
from app.optics.jones import PAULI_Y, PAULI_Z, WaveplateSetting, analyzer_states, waveplate_sequence
from app.optics.projection import project_arm
from app.optics.states import DensityMatrix, PureState2, Unitary2
from app.utils.enums import Arm, Herald, Plane, WaveplateKind
from app.utils.exceptions import SimulationError

CONSISTENCY_TOL = 1e-10

# beam order: first entry is met first; product reads qwp(90)·hwp(θ)·qwp(0)
CORRECTION_WAVEPLATES = {
    Plane.MERIDIAN: ((WaveplateKind.QWP, 0.0), (WaveplateKind.HWP, 45.0), (WaveplateKind.QWP, 90.0)),
    Plane.EQUATORIAL: ((WaveplateKind.QWP, 0.0), (WaveplateKind.HWP, 0.0), (WaveplateKind.QWP, 90.0)),
}


@dataclass(frozen=True)
class HeraldBranch:
    probability: float
    state: Optional[DensityMatrix]

    @property
    def possible(self) -> bool:
        return self.state is not None


@dataclass(frozen=True)
class RspOutcome:
    target: PureState2
    conditional: Dict[Herald, HeraldBranch]
    unconditional: DensityMatrix

    def __post_init__(self):
        total = sum(branch.probability for branch in self.conditional.values())
        if abs(total - 1.0) > CONSISTENCY_TOL:
            raise SimulationError(f"herald probabilities sum to {total!r}")
        mixture = sum(
            branch.probability * branch.state.matrix
            for branch in self.conditional.values() if branch.possible
        )
        if np.max(np.abs(mixture - self.unconditional.matrix)) > CONSISTENCY_TOL:
            raise SimulationError("unconditional state is not the herald-weighted mixture")


def pm_projector(setting: PmSetting) -> PureState2:
    """State whose detection at the transmitted port fires the trigger."""
    qwp = setting.qwp_angle if setting.qwp_present else None
    transmitted, _ = analyzer_states(setting.hwp_angle, qwp)
    return transmitted


def correction_settings(plane: Plane, offset_deg: float = 0.0) -> list[WaveplateSetting]:
    return [WaveplateSetting(kind, angle + offset_deg) for kind, angle in CORRECTION_WAVEPLATES[Plane(plane)]]


def correction_unitary(plane: Plane) -> Unitary2:
    """iσ_y for the meridian plane, σ_z for the equatorial plane."""
    if Plane(plane) is Plane.MERIDIAN:
        return Unitary2(1j * PAULI_Y)
    return Unitary2(PAULI_Z)


def correction_from_waveplates(plane: Plane, offset_deg: float = 0.0) -> Unitary2:
    return waveplate_sequence(correction_settings(plane, offset_deg))


def run_rsp(
    rho: DensityMatrix,
    setting: PmSetting,
    plane: Plane,
    feedforward: bool = True,
    switch: Optional[SwitchModel] = None,
    u_a: Optional[Unitary2] = None,
    u_b: Optional[Unitary2] = None,
    miscalibration_deg: Optional[float] = None,
    leak_probability: Optional[float] = None,
) -> RspOutcome:
    """
    Run one protocol shot with infinite statistics.

    Args:
        rho: two-photon state (idler ⊗ signal)
        setting: PM-station waveplates
        plane: selects the waveplate correction used for U_B when u_b is not given
        feedforward: when False the switches stay in the bar state (always U_A)
        switch: switch model; its isolation sets the default crosstalk
        u_a, u_b: path unitaries, default identity and the waveplate correction
        miscalibration_deg: offset on every correction waveplate
        leak_probability: crosstalk override

    Returns:
        RspOutcome with per-herald branches and their mixture
    """
    switch = switch or SwitchModel()
    leak = switch.leak_probability if leak_probability is None else float(leak_probability)
    if not 0.0 <= leak < 1.0:
        raise SimulationError(f"leak probability must lie in [0, 1), got {leak}")
    u_a = u_a or Unitary2.identity()
    if u_b is None:
        u_b = correction_from_waveplates(plane, miscalibration_deg or 0.0)

    target = pm_projector(setting)
    branches: Dict[Herald, HeraldBranch] = {}
    mixture = np.zeros((2, 2), dtype=complex)
    for herald, projector in ((Herald.TRANSMIT, target), (Herald.REFLECT, target.orthogonal())):
        projection = project_arm(rho, Arm.IDLER, projector)
        if not projection.possible:
            branches[herald] = HeraldBranch(projection.probability, None)
            continue
        if feedforward and herald is Herald.TRANSMIT:
            intended, crossed = u_b, u_a
        else:
            intended, crossed = u_a, u_b
        state = projection.conditional
        routed = (1 - leak) * intended.conjugate(state).matrix + leak * crossed.conjugate(state).matrix
        branch_state = DensityMatrix.from_operator(routed, normalize=False)
        branches[herald] = HeraldBranch(projection.probability, branch_state)
        mixture += projection.probability * branch_state.matrix
    return RspOutcome(target, branches, DensityMatrix.from_operator(mixture, normalize=False))
