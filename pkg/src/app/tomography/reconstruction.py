"""Least-squares density-matrix reconstruction with the physical constraints built in.

The cost is C(ρ) = Σ_j (Tr[O_j ρ] − P_j)² over every outcome projector O_j. A linear
fit over the trace-one Hermitian matrices is tried first; when it is not positive
semidefinite the fit is redone over ρ = T†T / Tr(T†T) with T lower triangular,
using L-BFGS-B and the analytic gradient.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from app.optics.jones import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z
from app.optics.states import DensityMatrix
from app.tomography.counts import CountRecord, estimate_probs
from app.tomography.suites import TomographySetting, projectors_for
from app.utils.decorators import timed
from app.utils.exceptions import DimensionMismatchError, NotInformationallyCompleteError
from app.utils.logging import logger

PSD_TOL = 1e-10
CONDITION_WARNING = 1e6
FTOL = 1e-12
MAX_ITERATIONS = 10_000
RANK_TOL = 1e-9


@dataclass(frozen=True)
class TomographyResult:
    rho: DensityMatrix
    residual: float
    iterations: int
    converged: bool


@lru_cache(maxsize=2)
def _traceless_basis(dim: int) -> tuple[np.ndarray, ...]:
    paulis = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)
    if dim == 2:
        return paulis[1:]
    if dim == 4:
        return tuple(np.kron(a, b) for a, b in product(paulis, paulis))[1:]
    raise DimensionMismatchError(f"tomography supports dimension 2 or 4, got {dim}")


def _operators(settings: Sequence[TomographySetting], dim: int) -> np.ndarray:
    operators = []
    for setting in settings:
        if setting.dim != dim:
            raise DimensionMismatchError(f"setting acts on dimension {setting.dim}, expected {dim}")
        operators.extend(projector for _, projector in projectors_for(setting))
    return np.array(operators)


def measurement_matrix(settings: Sequence[TomographySetting], dim: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Linear map from the traceless coordinates of ρ to outcome probabilities.

    ρ = I/d + Σ_k c_k B_k / d with B_k the non-identity Pauli products, so
    Tr[O_j ρ] = Tr[O_j]/d + Σ_k A_jk c_k.

    Returns:
        (A, offsets) with offsets_j = Tr[O_j]/d

    Raises:
        NotInformationallyCompleteError: when A has rank below d² − 1
    """
    operators = _operators(settings, dim)
    basis = _traceless_basis(dim)
    matrix = np.array([[np.real(np.trace(op @ b)) / dim for b in basis] for op in operators])
    offsets = np.array([np.real(np.trace(op)) / dim for op in operators])
    required = dim * dim - 1
    singular = np.linalg.svd(matrix, compute_uv=False) if matrix.size else np.zeros(0)
    rank = int(np.sum(singular > RANK_TOL * max(1.0, singular[0] if singular.size else 1.0)))
    if rank < required:
        raise NotInformationallyCompleteError(rank, required)
    condition = singular[0] / singular[required - 1]
    if condition > CONDITION_WARNING:
        logger.warning({'message': "ill-conditioned measurement matrix", 'condition_number': condition})
    return matrix, offsets


def _cost(rho: np.ndarray, operators: np.ndarray, probs: np.ndarray) -> float:
    predicted = np.real(np.einsum("jab,ba->j", operators, rho))
    return float(np.sum((predicted - probs) ** 2))


def _unpack(x: np.ndarray, dim: int, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    n = rows.size
    t = np.zeros((dim, dim), dtype=complex)
    t[rows, cols] = x[:n] + 1j * x[n:]
    return t


def _start_point(rho_linear: np.ndarray, dim: int, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Cholesky-type factor of the clipped linear estimate, with T lower triangular and ρ ∝ T†T."""
    eigenvalues, vectors = np.linalg.eigh(rho_linear)
    clipped = np.clip(eigenvalues, 1e-3, None)
    start = (vectors * clipped) @ vectors.conj().T
    start /= np.trace(start).real
    flip = np.eye(dim)[::-1]
    lower = np.linalg.cholesky(flip @ start @ flip)
    t = (flip @ lower @ flip).conj().T
    return np.concatenate([t[rows, cols].real, t[rows, cols].imag])


@timed("ls_reconstruct")
def ls_reconstruct(
    settings: Sequence[TomographySetting],
    probs: np.ndarray,
    dim: int,
) -> TomographyResult:
    """
    Reconstruct a density matrix from outcome probabilities.

    Args:
        settings: tomography settings; their projectors define the outcomes
        probs: probabilities, one row per setting (or flattened in the same order)
        dim: 2 for one photon, 4 for a pair

    Returns:
        TomographyResult whose rho is Hermitian, trace one and positive semidefinite
    """
    matrix, offsets = measurement_matrix(settings, dim)
    operators = _operators(settings, dim)
    probs = np.asarray(probs, dtype=float).ravel()
    if probs.size != operators.shape[0]:
        raise DimensionMismatchError(f"{operators.shape[0]} probabilities expected, got {probs.size}")

    coefficients, *_ = np.linalg.lstsq(matrix, probs - offsets, rcond=None)
    rho_linear = np.eye(dim, dtype=complex) / dim
    for c, b in zip(coefficients, _traceless_basis(dim)):
        rho_linear = rho_linear + c * b / dim
    rho_linear = (rho_linear + rho_linear.conj().T) / 2
    if np.linalg.eigvalsh(rho_linear).min() >= -PSD_TOL:
        return TomographyResult(
            rho=DensityMatrix.from_operator(rho_linear),
            residual=_cost(rho_linear, operators, probs),
            iterations=0,
            converged=True,
        )

    rows, cols = np.tril_indices(dim)
    identity = np.eye(dim)

    def objective(x: np.ndarray) -> tuple[float, np.ndarray]:
        t = _unpack(x, dim, rows, cols)
        m = t.conj().T @ t
        tau = np.trace(m).real
        rho = m / tau
        predicted = np.real(np.einsum("jab,ba->j", operators, rho))
        residuals = predicted - probs
        g = np.einsum("j,jab->ab", 2 * residuals, operators - predicted[:, None, None] * identity) / tau
        grad = 2 * (t @ g)
        return float(np.sum(residuals ** 2)), np.concatenate([grad[rows, cols].real, grad[rows, cols].imag])

    result = minimize(
        objective,
        _start_point(rho_linear, dim, rows, cols),
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": MAX_ITERATIONS, "ftol": FTOL, "gtol": 1e-14, "maxfun": 5 * MAX_ITERATIONS},
    )
    t = _unpack(result.x, dim, rows, cols)
    m = t.conj().T @ t
    rho = DensityMatrix.from_operator(m)
    converged = bool(result.success) or float(np.max(np.abs(result.jac))) < 1e-8
    if not converged:
        logger.warning({'message': "constrained reconstruction did not converge",
                        'iterations': result.nit, 'reason': str(result.message)})
    else:
        logger.debug({'message': "constrained reconstruction", 'iterations': result.nit, 'cost': result.fun})
    return TomographyResult(
        rho=rho,
        residual=_cost(rho.matrix, operators, probs),
        iterations=int(result.nit),
        converged=converged,
    )


def reconstruct_from_counts(records: Sequence[CountRecord], dim: int | None = None) -> TomographyResult:
    if not records:
        raise NotInformationallyCompleteError(0, 3)
    dim = dim or records[0].setting.dim
    settings = [record.setting for record in records]
    probs = np.concatenate([estimate_probs(record) for record in records])
    return ls_reconstruct(settings, probs, dim)
