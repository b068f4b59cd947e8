"""Jones matrices of the waveplates and rotators used at every station.

Conventions (lab frame, angles in degrees measured from the horizontal axis):

* R(θ) = [[cos θ, -sin θ], [sin θ, cos θ]]
* HWP(θ) = R(θ) diag(1, -1) R(θ)^T = [[cos 2θ, sin 2θ], [sin 2θ, -cos 2θ]]
* QWP(θ) = R(θ) diag(1, -i) R(θ)^T

With this sign choice qwp(45°)|H> = (|H> + i|V>)/√2 up to phase, qwp(θ)² = hwp(θ),
and an analyzer made of QWP(45°) then HWP(θ') then a PBS transmits the state with
relative phase φ = 4(θ' - 22.5°).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from app.optics.states import PureState2, Unitary2, H
from app.utils.enums import WaveplateKind

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _rotation(angle_rad: float) -> np.ndarray:
    c, s = np.cos(angle_rad), np.sin(angle_rad)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _retarder(angle_deg: float, slow_axis_factor: complex) -> np.ndarray:
    rot = _rotation(np.deg2rad(angle_deg))
    return rot @ np.diag([1.0, slow_axis_factor]) @ rot.T


def hwp_unitary(angle_deg: float) -> Unitary2:
    return Unitary2(_retarder(angle_deg, -1.0))


def qwp_unitary(angle_deg: float) -> Unitary2:
    return Unitary2(_retarder(angle_deg, -1j))


def rotator_unitary(angle_deg: float) -> Unitary2:
    """Pure rotation of the polarization ellipse by angle_deg (equals hwp(angle/2)·hwp(0))."""
    return Unitary2(_rotation(np.deg2rad(angle_deg)))


@dataclass(frozen=True)
class WaveplateSetting:
    kind: WaveplateKind
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "kind", WaveplateKind(self.kind))
        object.__setattr__(self, "angle", float(self.angle) % 180.0)

    def unitary(self) -> Unitary2:
        if self.kind is WaveplateKind.HWP:
            return hwp_unitary(self.angle)
        return qwp_unitary(self.angle)

    def shifted(self, offset_deg: float) -> WaveplateSetting:
        return WaveplateSetting(self.kind, self.angle + offset_deg)


def waveplate_sequence(settings: Iterable[WaveplateSetting]) -> Unitary2:
    """Compose waveplates in beam order: the first setting is the first one the light meets."""
    total = np.eye(2, dtype=complex)
    for setting in settings:
        total = setting.unitary().matrix @ total
    return Unitary2(total)


def analyzer_states(hwp_deg: float, qwp_deg: Optional[float]) -> tuple[PureState2, PureState2]:
    """
    States transmitted and reflected by an optional QWP, then a HWP, then a PBS.

    Args:
        hwp_deg: HWP fast-axis angle
        qwp_deg: QWP fast-axis angle, or None when the QWP is absent

    Returns:
        (transmitted, reflected); the PBS transmits H so transmitted = U^dag |H>
    """
    plates = []
    if qwp_deg is not None:
        plates.append(WaveplateSetting(WaveplateKind.QWP, qwp_deg))
    plates.append(WaveplateSetting(WaveplateKind.HWP, hwp_deg))
    back = waveplate_sequence(plates).dagger()
    transmitted = back.apply(H)
    return transmitted, transmitted.orthogonal()
