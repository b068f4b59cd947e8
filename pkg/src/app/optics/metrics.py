from __future__ import annotations

from typing import Union

import numpy as np

from app.optics.jones import PAULI_X, PAULI_Y, PAULI_Z
from app.optics.states import DensityMatrix, PureState2, Unitary2, phase_aligned, PHASE_TOL
from app.utils.exceptions import DimensionMismatchError

PureTarget = Union[PureState2, np.ndarray]
PhaseComparable = Union[PureState2, Unitary2, np.ndarray]


def _target_vector(target: PureTarget) -> np.ndarray:
    if isinstance(target, PureState2):
        return np.asarray(target.vector)
    vector = np.asarray(target, dtype=complex).ravel()
    return vector / np.linalg.norm(vector)


def _raw(value: PhaseComparable) -> np.ndarray:
    if isinstance(value, PureState2):
        return np.asarray(value.vector)
    if isinstance(value, Unitary2):
        return np.asarray(value.matrix)
    return np.asarray(value, dtype=complex)


def fidelity_pure(rho: DensityMatrix, target: PureTarget) -> float:
    """⟨ψ|ρ|ψ⟩ for a pure target of the same dimension."""
    psi = _target_vector(target)
    if psi.shape[0] != rho.dim:
        raise DimensionMismatchError(f"target has dimension {psi.shape[0]}, state has {rho.dim}")
    return float(np.real(np.vdot(psi, rho.matrix @ psi)))


def purity(rho: DensityMatrix) -> float:
    return float(np.real(np.trace(rho.matrix @ rho.matrix)))


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(ρ) σ sqrt(ρ)))², computed from the spectrum of ρσ."""
    if rho.dim != sigma.dim:
        raise DimensionMismatchError(f"dimensions differ: {rho.dim} vs {sigma.dim}")
    eigenvalues = np.linalg.eigvals(rho.matrix @ sigma.matrix)
    roots = np.sqrt(np.clip(eigenvalues.real, 0.0, None))
    return float(min(1.0, np.sum(roots) ** 2))


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    if rho.dim != sigma.dim:
        raise DimensionMismatchError(f"dimensions differ: {rho.dim} vs {sigma.dim}")
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(rho.matrix - sigma.matrix))))


def concurrence(rho: DensityMatrix) -> float:
    """Wootters concurrence of a two-photon state."""
    if rho.dim != 4:
        raise DimensionMismatchError("concurrence needs a two-photon (4x4) state")
    yy = np.kron(PAULI_Y, PAULI_Y)
    rho_tilde = yy @ rho.matrix.conj() @ yy
    eigenvalues = np.linalg.eigvals(rho.matrix @ rho_tilde)
    lambdas = np.sort(np.sqrt(np.clip(eigenvalues.real, 0.0, None)))[::-1]
    return float(max(0.0, lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]))


def equal_up_to_phase(a: PhaseComparable, b: PhaseComparable, tol: float = PHASE_TOL) -> bool:
    a, b = _raw(a), _raw(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shapes differ: {a.shape} vs {b.shape}")
    return phase_aligned(a, b)[1] <= tol


def phase_distance(a: PhaseComparable, b: PhaseComparable) -> float:
    """Frobenius distance between a and b minimized over a global phase."""
    a, b = _raw(a), _raw(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shapes differ: {a.shape} vs {b.shape}")
    squared = np.vdot(a, a).real + np.vdot(b, b).real - 2 * abs(np.vdot(a, b))
    return float(np.sqrt(max(0.0, squared)))


def bloch_vector(rho: DensityMatrix) -> np.ndarray:
    """(⟨X⟩, ⟨Y⟩, ⟨Z⟩) with X along D, Y along R and Z along H."""
    if rho.dim != 2:
        raise DimensionMismatchError("Bloch vector needs a single-photon state")
    return np.array([np.real(np.trace(rho.matrix @ pauli)) for pauli in (PAULI_X, PAULI_Y, PAULI_Z)])
