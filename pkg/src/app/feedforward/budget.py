from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from app.feedforward.models import LossComponent, SwitchModel, TimingBudget


@dataclass(frozen=True)
class TimingReport:
    detector_to_ttm_ns: float
    ttm_processing_ns: float
    signal_propagation_ns: float
    latency_ns: float
    delay_fiber_m: float
    photon_delay_ns: float
    switch_response_ns: float
    slack_ns: float
    gate_duration_ns: float
    required_gate_ns: float
    max_herald_rate_hz: float
    feasible: bool
    reasons: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class LossBudget:
    components: list[LossComponent]
    total_db: float
    transmission: float


@dataclass(frozen=True)
class RateEstimate:
    pair_rate_hz: float
    singles_signal_hz: float
    singles_idler_hz: float
    coincidence_hz: float
    capped: bool


def db_to_transmission(db: float) -> float:
    return 10.0 ** (-db / 10.0)


def default_loss_components() -> list[LossComponent]:
    return [
        LossComponent(name="switch_1", db=1.3),
        LossComponent(name="switch_2", db=1.3),
        LossComponent(name="u_bench", db=0.7),
    ]


def timing_report(budget: TimingBudget, switch: Optional[SwitchModel] = None) -> TimingReport:
    """
    Check that the trigger beats the delayed signal photon to the switch.

    Feasible when latency + switch response fits inside the fiber delay and the
    gate stays open long enough for the signal to cross U_B after the switch settles.
    """
    switch = switch or SwitchModel()
    latency = budget.latency_ns
    delay = budget.delay_ns
    slack = delay - latency
    required_gate = switch.response_time_ns + budget.interswitch_transit_ns
    reasons = []
    if latency + switch.response_time_ns > delay:
        reasons.append(
            f"trigger arrives {latency + switch.response_time_ns - delay:.1f} ns after the signal photon"
        )
    if budget.gate_duration_ns < required_gate:
        reasons.append(
            f"gate {budget.gate_duration_ns:.1f} ns shorter than response + transit {required_gate:.1f} ns"
        )
    max_rate = min(
        switch.max_duty_cycle_hz,
        1.0e9 / budget.gate_duration_ns,
        1.0e9 / budget.detector_deadtime_ns,
    )
    return TimingReport(
        detector_to_ttm_ns=budget.detector_to_ttm_ns,
        ttm_processing_ns=budget.ttm_processing_ns,
        signal_propagation_ns=budget.signal_propagation_ns,
        latency_ns=latency,
        delay_fiber_m=budget.delay_fiber_m,
        photon_delay_ns=delay,
        switch_response_ns=switch.response_time_ns,
        slack_ns=slack,
        gate_duration_ns=budget.gate_duration_ns,
        required_gate_ns=required_gate,
        max_herald_rate_hz=max_rate,
        feasible=not reasons,
        reasons=reasons,
    )


def loss_budget(components: Sequence[LossComponent]) -> LossBudget:
    components = list(components)
    total = sum(component.db for component in components)
    return LossBudget(components, total, db_to_transmission(total))


def rate_estimate(
    budget: TimingBudget,
    pair_rate_hz: float,
    signal_transmission: float,
    idler_transmission: float,
    switch: Optional[SwitchModel] = None,
) -> RateEstimate:
    """Singles and coincidences after losses, capped by the herald rate the hardware can follow."""
    if pair_rate_hz < 0:
        raise ValueError("pair rate must be non-negative")
    for name, value in (("signal", signal_transmission), ("idler", idler_transmission)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} transmission must lie in [0, 1], got {value}")
    cap = timing_report(budget, switch).max_herald_rate_hz
    idler = pair_rate_hz * idler_transmission
    coincidences = pair_rate_hz * signal_transmission * idler_transmission
    capped = idler > cap
    if capped:
        scale = cap / idler
        idler = cap
        coincidences *= scale
    return RateEstimate(
        pair_rate_hz=pair_rate_hz,
        singles_signal_hz=pair_rate_hz * signal_transmission,
        singles_idler_hz=idler,
        coincidence_hz=coincidences,
        capped=capped,
    )
