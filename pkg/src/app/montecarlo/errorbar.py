"""Monte Carlo error bars: waveplate-angle jitter plus count noise, one seeded generator per trial."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

import numpy as np

from app.optics.metrics import fidelity_pure, purity
from app.optics.states import DensityMatrix, PSI_MINUS
from app.tomography.counts import estimate_probs, probabilities_from_state, sample_counts
from app.tomography.reconstruction import TomographyResult, ls_reconstruct
from app.tomography.suites import TomographySetting, TWO_QUBIT_SUITE
from app.utils.enums import NoiseModel

SEED_STRIDE = 1_000_003

T = TypeVar("T")


def derive_seed(master: int, index: int) -> int:
    """Per-task seed: master + index × a large prime, so tasks never share a stream."""
    return int(master) + int(index) * SEED_STRIDE


@dataclass(frozen=True)
class ErrorBar:
    mean: float
    sigma: float
    samples: tuple[float, ...]


@dataclass(frozen=True)
class TrialContext:
    index: int
    rng: np.random.Generator
    angle_jitter_sigma: float

    def jitter_suite(self, suite: Sequence[TomographySetting]) -> list[TomographySetting]:
        """Offset every waveplate of every setting by an independent normal draw."""
        if self.angle_jitter_sigma > 0:
            offsets = self.rng.normal(0.0, self.angle_jitter_sigma, size=(len(suite), 4))
        else:
            offsets = np.zeros((len(suite), 4))
        jittered = []
        for setting, (signal_hwp, signal_qwp, idler_hwp, idler_qwp) in zip(suite, offsets):
            signal = setting.signal.jittered(signal_hwp, signal_qwp)
            idler = None if setting.idler is None else setting.idler.jittered(idler_hwp, idler_qwp)
            jittered.append(TomographySetting(signal=signal, idler=idler))
        return jittered


def run_trials(
    experiment: Callable[[TrialContext], T],
    n_trials: int,
    angle_jitter_sigma: float,
    seed: int,
) -> list[T]:
    return [
        experiment(TrialContext(trial, np.random.default_rng(derive_seed(seed, trial)), angle_jitter_sigma))
        for trial in range(n_trials)
    ]


def summarize(samples: Sequence[float]) -> ErrorBar:
    values = np.asarray(samples, dtype=float)
    sigma = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    return ErrorBar(float(np.mean(values)), sigma, tuple(float(v) for v in values))


def mc_errorbar(
    experiment: Callable[[TrialContext], float],
    n_trials: int,
    angle_jitter_sigma: float,
    seed: int,
) -> ErrorBar:
    """
    Mean and sample standard deviation of a seeded experiment over jittered trials.

    Args:
        experiment: closure mapping a TrialContext (generator + jitter width) to a figure of merit
        n_trials: at least 2
        angle_jitter_sigma: waveplate angle standard deviation, degrees
        seed: master seed; trial k uses derive_seed(seed, k)
    """
    if n_trials < 2:
        raise ValueError("mc_errorbar needs at least two trials")
    if angle_jitter_sigma < 0:
        raise ValueError("angle jitter must be non-negative")
    return summarize(run_trials(experiment, n_trials, angle_jitter_sigma, seed))


def tomograph(
    rho: DensityMatrix,
    suite: Sequence[TomographySetting],
    context: TrialContext,
    counts_per_setting: int,
    infinite_statistics: bool = False,
    model: NoiseModel = NoiseModel.MULTINOMIAL,
) -> TomographyResult:
    """Measure rho with jittered waveplates, fit assuming the nominal ones."""
    actual = context.jitter_suite(suite)
    probabilities = probabilities_from_state(rho, actual)
    if infinite_statistics:
        estimated = probabilities
    else:
        records = sample_counts(actual, probabilities, counts_per_setting, context.rng, model)
        estimated = np.array([estimate_probs(record) for record in records])
    return ls_reconstruct(suite, estimated, rho.dim)


def tomography_errorbar(
    rho: DensityMatrix,
    counts_per_setting: int,
    angle_jitter_sigma: float,
    n_trials: int,
    seed: int,
    target=PSI_MINUS,
    infinite_statistics: bool = False,
    model: NoiseModel = NoiseModel.MULTINOMIAL,
) -> tuple[ErrorBar, ErrorBar]:
    """Fidelity and purity error bars of two-photon tomography of rho."""
    if n_trials < 2:
        raise ValueError("tomography_errorbar needs at least two trials")
    results = run_trials(
        lambda context: tomograph(rho, TWO_QUBIT_SUITE, context, counts_per_setting, infinite_statistics, model),
        n_trials, angle_jitter_sigma, seed,
    )
    return (
        summarize([fidelity_pure(result.rho, target) for result in results]),
        summarize([purity(result.rho) for result in results]),
    )
