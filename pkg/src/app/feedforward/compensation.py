"""Emulation of the iterative fiber polarization compensation.

The compensator applied after the fiber is C = Z(phase) · Y(tilt) · Z(twist), where Y is a
rotator (paddle tilt) and Z a retarder about the H/V axis. Z is realized the way the bench
does it: a rotation sandwiched between QWPs at 45°, which decouples it from the H/V populations.
The H-basis pass tunes tilt and twist until |H> comes back without a V component; the D-basis
pass tunes only the phase, which leaves the H-basis result untouched.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import unitary_group

from app.optics.jones import qwp_unitary, rotator_unitary
from app.optics.states import A, D, H, V, Unitary2
from app.utils.decorators import timed
from app.utils.logging import logger

COARSE_STEPS = 64
MAX_ITERATIONS = 50


@dataclass(frozen=True)
class CompensationReport:
    compensation: Unitary2
    iterations: int
    residual_infidelity: float
    converged: bool
    twist: float
    tilt: float
    phase: float
    basis_passes: Dict[str, int] = field(default_factory=dict)


def random_fiber_unitary(seed: int) -> Unitary2:
    """Seeded Haar-random Jones matrix standing in for an unknown fiber."""
    return Unitary2(unitary_group.rvs(2, random_state=seed))


def _tilt(angle_rad: float) -> np.ndarray:
    # Bloch-sphere angle; the lab rotator turns by half of it
    return rotator_unitary(np.rad2deg(angle_rad) / 2).matrix


def _decoupled_z(angle_rad: float) -> np.ndarray:
    qwp = qwp_unitary(45.0).matrix
    return qwp @ _tilt(angle_rad) @ qwp.conj().T


def _compensator(twist: float, tilt: float, phase: float) -> np.ndarray:
    return _decoupled_z(phase) @ _tilt(tilt) @ _decoupled_z(twist)


def _leak(total: np.ndarray, probe_in, probe_blocked) -> float:
    """Probability that the probe leaves through the port that should stay dark."""
    return float(abs(np.vdot(probe_blocked.vector, total @ probe_in.vector)) ** 2)


def _line_search(cost: Callable[[float], float], current: float, rng: np.random.Generator) -> float:
    """Coarse scan from a random starting offset, then bounded refinement; only improvements are kept."""
    step = 2 * np.pi / COARSE_STEPS
    grid = rng.uniform(-np.pi, -np.pi + step) + step * np.arange(COARSE_STEPS)
    values = [cost(x) for x in grid]
    best = float(grid[int(np.argmin(values))])
    refined = minimize_scalar(cost, bounds=(best - step, best + step), method="bounded", options={"xatol": 1e-12})
    candidate = float(refined.x) if cost(float(refined.x)) < cost(best) else best
    return candidate if cost(candidate) < cost(current) else current


@timed("simulate_compensation")
def simulate_compensation(
    fiber: Unitary2,
    rng_seed: int,
    tolerance: float = 1e-6,
    max_iterations: int = MAX_ITERATIONS,
) -> CompensationReport:
    """
    Alternate H-basis and D-basis passes until both probes are extinguished.

    Args:
        fiber: unknown fiber Jones matrix
        rng_seed: seeds where each coarse scan starts
        tolerance: target for the worst transmitted (leaked) probe probability
        max_iterations: cap on H+D pass pairs

    Returns:
        CompensationReport; converged=False carries the best residual reached
    """
    rng = np.random.default_rng(rng_seed)
    fiber_matrix = fiber.matrix
    angles = {"twist": 0.0, "tilt": 0.0, "phase": 0.0}
    passes = {"H": 0, "D": 0}

    def cost_h(**override) -> float:
        params = {**angles, **override}
        return _leak(_compensator(**params) @ fiber_matrix, H, V)

    def cost_d(**override) -> float:
        params = {**angles, **override}
        return _leak(_compensator(**params) @ fiber_matrix, D, A)

    def residual() -> float:
        return max(cost_h(), cost_d())

    iterations = 0
    while residual() >= tolerance and iterations < max_iterations:
        iterations += 1
        if cost_h() >= tolerance:
            passes["H"] += 1
            for name in ("tilt", "twist", "tilt"):
                if cost_h() < tolerance:
                    break
                angles[name] = _line_search(lambda x, n=name: cost_h(**{n: x}), angles[name], rng)
        if cost_d() >= tolerance:
            passes["D"] += 1
            angles["phase"] = _line_search(lambda x: cost_d(phase=x), angles["phase"], rng)
        logger.debug({'message': "compensation iteration", 'iteration': iterations,
                      'leak_h': cost_h(), 'leak_d': cost_d()})

    final = residual()
    converged = final < tolerance
    if not converged:
        logger.warning({'message': "fiber compensation did not converge",
                        'iterations': iterations, 'residual': final})
    else:
        logger.info({'message': "fiber compensation converged", 'iterations': iterations, 'residual': final})
    return CompensationReport(
        compensation=Unitary2(_compensator(**angles)),
        iterations=iterations,
        residual_infidelity=final,
        converged=converged,
        twist=angles["twist"],
        tilt=angles["tilt"],
        phase=angles["phase"],
        basis_passes=passes,
    )
