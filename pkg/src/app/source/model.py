"""Noisy polarization-entangled pair source: the state fed to the protocol and to tomography."""
from __future__ import annotations

from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.optics.projection import local_operator
from app.optics.states import DensityMatrix, PSI_MINUS
from app.utils.enums import Arm, SourceMode
from app.utils.logging import logger

MEASURED_PURITY = 0.89
MEASURED_PDL = 0.01


def visibility_for_purity(purity: float, mode: SourceMode = SourceMode.DEPHASED) -> float:
    """Invert purity(v): (1+v²)/2 for dephasing, (1+3v²)/4 for Werner noise."""
    mode = SourceMode(mode)
    if mode is SourceMode.WERNER:
        if not 0.25 <= purity <= 1.0:
            raise ValueError(f"Werner purity must lie in [0.25, 1], got {purity}")
        return float(np.sqrt((4 * purity - 1) / 3))
    if not 0.5 <= purity <= 1.0:
        raise ValueError(f"dephased purity must lie in [0.5, 1], got {purity}")
    return float(np.sqrt(2 * purity - 1))


class SourceModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    mode: SourceMode = Field(SourceMode.DEPHASED, description="ideal, dephased or werner")
    visibility: float = Field(1.0, ge=0.0, le=1.0, description="coherence/mixing parameter v")
    purity: Optional[float] = Field(None, ge=0.25, le=1.0, description="target purity; sets visibility when given")
    chi_signal: float = Field(0.0, description="residual fiber birefringence on the signal arm, radians")
    chi_idler: float = Field(0.0, description="residual fiber birefringence on the idler arm, radians")
    pdl_fraction: float = Field(0.0, ge=0.0, lt=1.0, description="polarization-dependent loss of V")
    pdl_arm: Arm = Field(Arm.SIGNAL, description="arm carrying the PDL element")
    leak_probability: Optional[float] = Field(
        None, ge=0.0, lt=1.0, description="switch crosstalk; None uses the switch isolation"
    )

    @model_validator(mode="before")
    @classmethod
    def _resolve_visibility(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        mode = SourceMode(data.get("mode", SourceMode.DEPHASED))
        if mode is SourceMode.IDEAL:
            forced = {"visibility": 1.0, "chi_signal": 0.0, "chi_idler": 0.0, "pdl_fraction": 0.0, "leak_probability": 0.0}
            overridden = [key for key, value in forced.items() if data.get(key) not in (None, value)]
            if overridden:
                logger.warning({'message': "ideal source ignores imperfection settings", 'keys': overridden})
            data.update(forced)
            data["purity"] = None
        elif data.get("purity") is not None:
            derived = visibility_for_purity(float(data["purity"]), mode)
            given = data.get("visibility")
            if given is not None and abs(float(given) - derived) > 1e-9:
                raise ValueError(f"visibility {given} contradicts purity {data['purity']} (implies {derived:.6f})")
            data["visibility"] = derived
        return data

    @classmethod
    def measured_meridian(cls) -> SourceModel:
        return cls(mode=SourceMode.DEPHASED, purity=MEASURED_PURITY, pdl_fraction=MEASURED_PDL, chi_signal=0.5)

    @classmethod
    def measured_equatorial(cls) -> SourceModel:
        return cls(mode=SourceMode.DEPHASED, purity=MEASURED_PURITY, pdl_fraction=MEASURED_PDL, chi_signal=0.25)


def dephase_singlet(v: float) -> DensityMatrix:
    """½(|HV⟩⟨HV| + |VH⟩⟨VH|) − (v/2)(|HV⟩⟨VH| + |VH⟩⟨HV|)."""
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {v}")
    matrix = np.zeros((4, 4), dtype=complex)
    matrix[1, 1] = matrix[2, 2] = 0.5
    matrix[1, 2] = matrix[2, 1] = -v / 2
    return DensityMatrix(matrix)


def werner_singlet(v: float) -> DensityMatrix:
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {v}")
    singlet = np.outer(PSI_MINUS, PSI_MINUS.conj())
    return DensityMatrix.from_operator(v * singlet + (1 - v) * np.eye(4) / 4)


def apply_birefringence(rho: DensityMatrix, chi: float, arm: Arm = Arm.SIGNAL) -> DensityMatrix:
    """Uncompensated fiber phase diag(e^{-iχ/2}, e^{iχ/2}) on one arm."""
    if chi == 0:
        return rho
    op = local_operator(np.diag([np.exp(-0.5j * chi), np.exp(0.5j * chi)]), arm)
    return DensityMatrix.from_operator(op @ rho.matrix @ op.conj().T, normalize=False)


def apply_pdl(rho: DensityMatrix, epsilon: float, arm: Arm = Arm.SIGNAL) -> DensityMatrix:
    """Kraus element diag(1, sqrt(1-ε)) on one arm, renormalized (post-selected on survival)."""
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"PDL fraction must lie in [0, 1), got {epsilon}")
    if epsilon == 0:
        return rho
    op = local_operator(np.diag([1.0, np.sqrt(1.0 - epsilon)]), arm)
    return DensityMatrix.from_operator(op @ rho.matrix @ op.conj().T)


def make_state(model: SourceModel) -> DensityMatrix:
    if model.mode is SourceMode.IDEAL:
        return DensityMatrix.from_pure(PSI_MINUS)
    if model.mode is SourceMode.WERNER:
        rho = werner_singlet(model.visibility)
    else:
        rho = dephase_singlet(model.visibility)
    rho = apply_birefringence(rho, model.chi_idler, Arm.IDLER)
    rho = apply_birefringence(rho, model.chi_signal, Arm.SIGNAL)
    return apply_pdl(rho, model.pdl_fraction, model.pdl_arm)
