"""Conditional projection, partial trace and local operators on two-photon states (idler ⊗ signal)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.optics.states import DensityMatrix, PureState2
from app.utils.enums import Arm
from app.utils.exceptions import DimensionMismatchError, ImpossibleOutcomeError

IMPOSSIBLE_TOL = 1e-14


@dataclass(frozen=True)
class Projection:
    probability: float
    unnormalized: np.ndarray
    conditional: Optional[DensityMatrix]

    @property
    def possible(self) -> bool:
        return self.conditional is not None

    def require_state(self) -> DensityMatrix:
        if self.conditional is None:
            raise ImpossibleOutcomeError(f"outcome has probability {self.probability:.3e}")
        return self.conditional


def _require_pair(rho: DensityMatrix) -> np.ndarray:
    if rho.dim != 4:
        raise DimensionMismatchError(f"expected a two-photon state, got dimension {rho.dim}")
    # indices: idler, signal, idler', signal'
    return rho.matrix.reshape(2, 2, 2, 2)


def project_arm(rho: DensityMatrix, arm: Arm, projector: PureState2) -> Projection:
    """Project one photon of the pair onto |p> and return the other photon's state."""
    tensor = _require_pair(rho)
    p = projector.vector
    if arm is Arm.IDLER:
        unnormalized = np.einsum("i,isjt,j->st", p.conj(), tensor, p)
    else:
        unnormalized = np.einsum("s,isjt,t->ij", p.conj(), tensor, p)
    probability = float(np.real(np.trace(unnormalized)))
    if probability < IMPOSSIBLE_TOL:
        return Projection(max(probability, 0.0), unnormalized, None)
    return Projection(probability, unnormalized, DensityMatrix.from_operator(unnormalized))


def partial_trace(rho: DensityMatrix, keep: Arm) -> DensityMatrix:
    tensor = _require_pair(rho)
    if keep is Arm.IDLER:
        reduced = np.einsum("isjs->ij", tensor)
    else:
        reduced = np.einsum("isit->st", tensor)
    return DensityMatrix.from_operator(reduced, normalize=False)


def local_operator(operator: np.ndarray, arm: Arm) -> np.ndarray:
    """Lift a 2x2 operator acting on one photon to the 4x4 pair space."""
    if arm is Arm.IDLER:
        return np.kron(operator, np.eye(2))
    return np.kron(np.eye(2), operator)
