"""Polarization state containers: single-photon pure states, 2x2 unitaries, density matrices."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from app.utils.exceptions import StateValidationError

CONSTRUCTION_TOL = 1e-12
VALIDATION_TOL = 1e-10
PHASE_TOL = 1e-10


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=complex)
    out.setflags(write=False)
    return out


def phase_aligned(a: np.ndarray, b: np.ndarray) -> Tuple[complex, float]:
    """Return (e^{iγ}, max|b - e^{iγ} a|) for the global phase γ best aligning a onto b."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    overlap = np.vdot(a, b)
    if abs(overlap) < PHASE_TOL:
        return 1.0 + 0.0j, float(np.max(np.abs(b - a)))
    phase = overlap / abs(overlap)
    return phase, float(np.max(np.abs(b - phase * a)))


@dataclass(frozen=True, eq=False)
class PureState2:
    amp_h: complex
    amp_v: complex

    def __post_init__(self):
        object.__setattr__(self, "amp_h", complex(self.amp_h))
        object.__setattr__(self, "amp_v", complex(self.amp_v))
        norm = abs(self.amp_h) ** 2 + abs(self.amp_v) ** 2
        if abs(norm - 1.0) > CONSTRUCTION_TOL:
            raise StateValidationError(f"pure state is not normalized: |a|^2+|b|^2 = {norm!r}")

    @classmethod
    def from_vector(cls, vector, normalize: bool = True) -> PureState2:
        vector = np.asarray(vector, dtype=complex).ravel()
        if vector.shape != (2,):
            raise StateValidationError(f"expected 2 amplitudes, got shape {vector.shape}")
        if normalize:
            norm = np.linalg.norm(vector)
            if norm == 0:
                raise StateValidationError("cannot normalize the zero vector")
            vector = vector / norm
        return cls(vector[0], vector[1])

    @classmethod
    def from_bloch(cls, theta: float, phi: float) -> PureState2:
        """Polar angle theta from |H>, azimuth phi from the H-D-V-A great circle (radians)."""
        return cls(np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2))

    @property
    def vector(self) -> np.ndarray:
        return _frozen([self.amp_h, self.amp_v])

    def density(self) -> DensityMatrix:
        vec = self.vector
        return DensityMatrix(np.outer(vec, vec.conj()))

    def orthogonal(self) -> PureState2:
        return PureState2(-np.conj(self.amp_v), np.conj(self.amp_h))

    def canonical(self) -> PureState2:
        """Same ray with the first non-negligible amplitude real and positive."""
        vec = self.vector
        pivot = vec[0] if abs(vec[0]) > PHASE_TOL else vec[1]
        phase = np.conj(pivot) / abs(pivot)
        return PureState2(vec[0] * phase, vec[1] * phase)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PureState2):
            return NotImplemented
        return phase_aligned(self.vector, other.vector)[1] <= PHASE_TOL

    __hash__ = None

    def __repr__(self) -> str:
        return f"PureState2(amp_h={self.amp_h:.6g}, amp_v={self.amp_v:.6g})"


@dataclass(frozen=True, eq=False)
class Unitary2:
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (2, 2):
            raise StateValidationError(f"Jones matrix must be 2x2, got {matrix.shape}")
        deviation = np.max(np.abs(matrix.conj().T @ matrix - np.eye(2)))
        if deviation > CONSTRUCTION_TOL:
            raise StateValidationError(f"matrix is not unitary (max |U^dag U - I| = {deviation:.3e})")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def identity(cls) -> Unitary2:
        return cls(np.eye(2))

    def dagger(self) -> Unitary2:
        return Unitary2(self.matrix.conj().T)

    def apply(self, state: PureState2) -> PureState2:
        return PureState2.from_vector(self.matrix @ state.vector, normalize=False)

    def conjugate(self, rho: DensityMatrix) -> DensityMatrix:
        if rho.dim != 2:
            raise StateValidationError(f"single-photon unitary applied to a dim-{rho.dim} state")
        return DensityMatrix.from_operator(self.matrix @ rho.matrix @ self.matrix.conj().T, normalize=False)

    def __matmul__(self, other: Unitary2) -> Unitary2:
        if not isinstance(other, Unitary2):
            return NotImplemented
        return Unitary2(self.matrix @ other.matrix)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Unitary2):
            return NotImplemented
        return phase_aligned(self.matrix, other.matrix)[1] <= PHASE_TOL

    __hash__ = None


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] not in (2, 4):
            raise StateValidationError(f"density matrix must be 2x2 or 4x4, got {matrix.shape}")
        if np.max(np.abs(matrix - matrix.conj().T)) > VALIDATION_TOL:
            raise StateValidationError("density matrix is not Hermitian")
        trace = np.trace(matrix).real
        if abs(trace - 1.0) > VALIDATION_TOL:
            raise StateValidationError(f"density matrix trace is {trace!r}, expected 1")
        min_eig = float(np.linalg.eigvalsh(matrix).min())
        if min_eig < -VALIDATION_TOL:
            raise StateValidationError(f"density matrix has negative eigenvalue {min_eig:.3e}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def from_operator(cls, operator, normalize: bool = True) -> DensityMatrix:
        """Hermitize (and optionally trace-normalize) a numerically computed operator."""
        operator = np.asarray(operator, dtype=complex)
        operator = (operator + operator.conj().T) / 2
        if normalize:
            trace = np.trace(operator).real
            if trace <= 0:
                raise StateValidationError(f"operator trace {trace!r} cannot be normalized")
            operator = operator / trace
        return cls(operator)

    @classmethod
    def from_pure(cls, vector) -> DensityMatrix:
        vector = np.asarray(vector, dtype=complex).ravel()
        vector = vector / np.linalg.norm(vector)
        return cls(np.outer(vector, vector.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> DensityMatrix:
        return cls(np.eye(dim) / dim)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def isclose(self, other: DensityMatrix, atol: float = VALIDATION_TOL) -> bool:
        return self.dim == other.dim and bool(np.allclose(self.matrix, other.matrix, atol=atol, rtol=0))


def mix(weighted: list[tuple[float, DensityMatrix]]) -> DensityMatrix:
    """Convex combination of equally sized density matrices."""
    total = sum(weight * rho.matrix for weight, rho in weighted)
    return DensityMatrix.from_operator(total)


SQRT_HALF = 1 / np.sqrt(2)

H = PureState2(1, 0)
V = PureState2(0, 1)
D = PureState2(SQRT_HALF, SQRT_HALF)
A = PureState2(SQRT_HALF, -SQRT_HALF)
R = PureState2(SQRT_HALF, 1j * SQRT_HALF)
L = PureState2(SQRT_HALF, -1j * SQRT_HALF)

NAMED_STATES = {"H": H, "V": V, "D": D, "A": A, "R": R, "L": L}

# two-photon vectors in the idler ⊗ signal basis |HH>, |HV>, |VH>, |VV>
PSI_MINUS = _frozen(np.array([0, 1, -1, 0]) * SQRT_HALF)
PSI_PLUS = _frozen(np.array([0, 1, 1, 0]) * SQRT_HALF)
PHI_MINUS = _frozen(np.array([1, 0, 0, -1]) * SQRT_HALF)
PHI_PLUS = _frozen(np.array([1, 0, 0, 1]) * SQRT_HALF)

BELL_STATES = {
    "psi-minus": PSI_MINUS,
    "psi-plus": PSI_PLUS,
    "phi-minus": PHI_MINUS,
    "phi-plus": PHI_PLUS,
}
