"""Analyzer settings for single-photon and coincidence tomography."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Optional

import numpy as np

from app.optics.jones import analyzer_states
from app.utils.enums import Arm

ONE_PHOTON_LABELS = ("H", "V")
TWO_PHOTON_LABELS = ("HH", "HV", "VH", "VV")


@dataclass(frozen=True)
class Analyzer:
    """QWP then HWP then PBS; 'H' is the transmitted port."""
    hwp_deg: float
    qwp_deg: float

    def jittered(self, hwp_offset: float, qwp_offset: float) -> Analyzer:
        return Analyzer(self.hwp_deg + hwp_offset, self.qwp_deg + qwp_offset)

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        return _analyzer_projectors(self.hwp_deg, self.qwp_deg)


@lru_cache(maxsize=4096)
def _analyzer_projectors(hwp_deg: float, qwp_deg: float) -> tuple[np.ndarray, np.ndarray]:
    transmitted, reflected = analyzer_states(hwp_deg, qwp_deg)
    pair = []
    for state in (transmitted, reflected):
        projector = np.outer(state.vector, state.vector.conj())
        projector.setflags(write=False)
        pair.append(projector)
    return pair[0], pair[1]


@dataclass(frozen=True)
class TomographySetting:
    signal: Analyzer
    idler: Optional[Analyzer] = None

    @property
    def dim(self) -> int:
        return 2 if self.idler is None else 4

    @property
    def arm(self) -> str:
        return Arm.SIGNAL.value if self.idler is None else "both"

    @property
    def labels(self) -> tuple[str, ...]:
        return ONE_PHOTON_LABELS if self.idler is None else TWO_PHOTON_LABELS


def projectors_for(setting: TomographySetting) -> list[tuple[str, np.ndarray]]:
    """Outcome projectors; two-photon labels read (idler, signal) and act on idler ⊗ signal."""
    signal = setting.signal.projectors()
    if setting.idler is None:
        return list(zip(ONE_PHOTON_LABELS, signal))
    idler = setting.idler.projectors()
    return [
        (label, np.kron(idler[i], signal[s]))
        for label, (i, s) in zip(TWO_PHOTON_LABELS, product(range(2), range(2)))
    ]


# H/V, R/L and D/A analyzers
BASIS_ANALYZERS = (Analyzer(0.0, 0.0), Analyzer(0.0, 45.0), Analyzer(22.5, 45.0))

SINGLE_QUBIT_SUITE = tuple(TomographySetting(signal=analyzer) for analyzer in BASIS_ANALYZERS)

TWO_QUBIT_SUITE = tuple(
    TomographySetting(signal=signal, idler=idler)
    for idler, signal in product(BASIS_ANALYZERS, BASIS_ANALYZERS)
)


def suite_for(dim: int) -> tuple[TomographySetting, ...]:
    if dim == 2:
        return SINGLE_QUBIT_SUITE
    if dim == 4:
        return TWO_QUBIT_SUITE
    raise ValueError(f"no tomography suite for dimension {dim}")
