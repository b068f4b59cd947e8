"""Fidelity-versus-Bloch-angle sweeps and the feed-forward-only fidelity study."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.feedforward.models import FeedForwardImperfections, PmSetting, SwitchModel
from app.feedforward.protocol import correction_unitary, pm_projector, run_rsp
from app.montecarlo.errorbar import derive_seed, run_trials, summarize, tomograph
from app.optics.metrics import fidelity, fidelity_pure, purity
from app.optics.projection import project_arm
from app.optics.states import DensityMatrix, PureState2, Unitary2, mix
from app.source.model import SourceModel, apply_birefringence, apply_pdl, make_state
from app.tomography.counts import probabilities_from_state
from app.tomography.reconstruction import ls_reconstruct
from app.tomography.suites import SINGLE_QUBIT_SUITE, TWO_QUBIT_SUITE
from app.utils.decorators import timed
from app.utils.enums import Arm, NoiseModel, Plane, SourceMode
from app.utils.exceptions import RspError, SweepPointError
from app.utils.logging import logger

DEFAULT_POINTS = 19
MERIDIAN_RANGE = (0.0, 90.0)
EQUATORIAL_RANGE = (22.5, 112.5)
EQUATORIAL_QWP = 45.0


class SweepSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    plane: Plane = Field(Plane.MERIDIAN)
    n_points: int = Field(DEFAULT_POINTS, ge=2, description="HWP angles across the plane's range")
    source: SourceModel = Field(default_factory=SourceModel)
    feedforward: bool = True
    counts_per_setting: int = Field(35_000, gt=0)
    angle_jitter_sigma: float = Field(0.5, ge=0.0, description="QST waveplate jitter, degrees")
    n_trials: int = Field(1, ge=1)
    seed: int = 0
    infinite_statistics: bool = Field(False, description="use exact probabilities instead of sampled counts")
    miscalibration_deg: float = Field(0.0, description="offset on every correction waveplate")
    noise_model: NoiseModel = NoiseModel.MULTINOMIAL


@dataclass(frozen=True)
class GridPoint:
    bloch_angle: float
    setting: PmSetting


@dataclass(frozen=True)
class SweepPoint:
    bloch_angle: float
    setting: PmSetting
    target: PureState2
    fidelity_mean: float
    fidelity_sigma: float
    purity_mean: float
    reconstructed_state: DensityMatrix


@dataclass(frozen=True)
class SweepResult:
    plane: Plane
    feedforward: bool
    points: list[SweepPoint] = field(default_factory=list)

    @property
    def fidelities(self) -> np.ndarray:
        return np.array([point.fidelity_mean for point in self.points])

    @property
    def mean_fidelity(self) -> float:
        return float(np.mean(self.fidelities))


@dataclass(frozen=True)
class FeedForwardFidelity:
    plane: Plane
    bloch_angles: list[float]
    fidelities: list[float]

    @property
    def mean(self) -> float:
        return float(np.mean(self.fidelities))


def bloch_grid(plane: Plane, n_points: int = DEFAULT_POINTS) -> list[GridPoint]:
    """PM-station settings across the plane; the Bloch angle is four times the HWP offset."""
    plane = Plane(plane)
    if n_points < 2:
        raise ValueError("a sweep needs at least two points")
    if plane is Plane.MERIDIAN:
        return [
            GridPoint(4 * hwp, PmSetting(hwp_angle=hwp))
            for hwp in np.linspace(*MERIDIAN_RANGE, n_points)
        ]
    return [
        GridPoint(4 * (hwp - EQUATORIAL_RANGE[0]), PmSetting(hwp_angle=hwp, qwp_present=True, qwp_angle=EQUATORIAL_QWP))
        for hwp in np.linspace(*EQUATORIAL_RANGE, n_points)
    ]


def resolve_leak(source: SourceModel, switch: Optional[SwitchModel] = None) -> float:
    if source.leak_probability is not None:
        return source.leak_probability
    return (switch or SwitchModel()).leak_probability


@timed("sweep_bloch")
def sweep_bloch(spec: SweepSpec, switch: Optional[SwitchModel] = None) -> SweepResult:
    """
    Prepare each grid state remotely, tomograph it and score it against its target.

    Each point runs n_trials trials with per-trial QST waveplate jitter and fresh counts;
    point k uses master seed derive_seed(spec.seed, k).
    """
    logger.info({'message': "sweep started", 'plane': spec.plane.value, 'feedforward': spec.feedforward,
                 'n_points': spec.n_points, 'n_trials': spec.n_trials,
                 'infinite_statistics': spec.infinite_statistics})
    rho = make_state(spec.source)
    leak = resolve_leak(spec.source, switch)
    # exact-expectation mode: no count noise and no waveplate jitter
    jitter = 0.0 if spec.infinite_statistics else spec.angle_jitter_sigma
    points = []
    for index, grid_point in enumerate(bloch_grid(spec.plane, spec.n_points)):
        try:
            outcome = run_rsp(
                rho, grid_point.setting, spec.plane,
                feedforward=spec.feedforward,
                switch=switch,
                miscalibration_deg=spec.miscalibration_deg,
                leak_probability=leak,
            )
            results = run_trials(
                lambda context: tomograph(
                    outcome.unconditional, SINGLE_QUBIT_SUITE, context,
                    spec.counts_per_setting, spec.infinite_statistics, spec.noise_model,
                ),
                spec.n_trials, jitter, derive_seed(spec.seed, index),
            )
        except RspError as e:
            raise SweepPointError(index, e) from e
        fidelities = summarize([fidelity_pure(result.rho, outcome.target) for result in results])
        purities = summarize([purity(result.rho) for result in results])
        points.append(SweepPoint(
            bloch_angle=float(grid_point.bloch_angle),
            setting=grid_point.setting,
            target=outcome.target,
            fidelity_mean=fidelities.mean,
            fidelity_sigma=fidelities.sigma,
            purity_mean=purities.mean,
            reconstructed_state=mix([(1 / len(results), result.rho) for result in results]),
        ))
    result = SweepResult(spec.plane, spec.feedforward, points)
    logger.info({'message': "sweep finished", 'plane': spec.plane.value, 'mean_fidelity': result.mean_fidelity})
    return result


def predicted_states(rho: DensityMatrix, plane: Plane, grid: Sequence[PmSetting]) -> list[DensityMatrix]:
    """Signal states an ideal protocol would deliver from rho: exact projection, exact correction, no leak."""
    correction = correction_unitary(plane).matrix
    identity = Unitary2.identity().matrix
    states = []
    for setting in grid:
        target = pm_projector(setting)
        total = np.zeros((2, 2), dtype=complex)
        for projector, unitary in ((target, correction), (target.orthogonal(), identity)):
            projected = project_arm(rho, Arm.IDLER, projector).unnormalized
            total += unitary @ projected @ unitary.conj().T
        states.append(DensityMatrix.from_operator(total, normalize=False))
    return states


@timed("feedforward_fidelity")
def feedforward_fidelity(
    plane: Plane,
    source: Optional[SourceModel] = None,
    imperfections: Optional[FeedForwardImperfections] = None,
    n_points: int = DEFAULT_POINTS,
    switch: Optional[SwitchModel] = None,
) -> FeedForwardFidelity:
    """
    Fidelity between ideal-protocol predictions and outputs degraded only in the feed-forward path.

    The prediction starts from a noiseless two-photon reconstruction of the source; the
    simulated output adds signal-path birefringence, PDL, correction-waveplate miscalibration
    and optional switch crosstalk.
    """
    source = source or SourceModel(mode=SourceMode.IDEAL)
    imperfections = imperfections or FeedForwardImperfections()
    rho = make_state(source)
    reconstructed = ls_reconstruct(TWO_QUBIT_SUITE, probabilities_from_state(rho, TWO_QUBIT_SUITE), 4).rho
    grid = bloch_grid(plane, n_points)
    predicted = predicted_states(reconstructed, plane, [point.setting for point in grid])

    degraded = apply_birefringence(rho, imperfections.chi_signal, Arm.SIGNAL)
    degraded = apply_pdl(degraded, imperfections.pdl_fraction, Arm.SIGNAL)
    fidelities = []
    for expected, point in zip(predicted, grid):
        outcome = run_rsp(
            degraded, point.setting, plane,
            feedforward=True,
            switch=switch,
            miscalibration_deg=imperfections.miscalibration_deg,
            leak_probability=imperfections.leak_probability,
        )
        fidelities.append(fidelity(expected, outcome.unconditional))
    result = FeedForwardFidelity(Plane(plane), [p.bloch_angle for p in grid], fidelities)
    logger.info({'message': "feed-forward fidelity", 'plane': Plane(plane).value, 'mean': result.mean})
    return result
