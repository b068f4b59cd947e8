from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field
from scipy.constants import c as SPEED_OF_LIGHT

from app.optics.jones import WaveplateSetting
from app.utils.enums import WaveplateKind

SPEED_OF_LIGHT_M_PER_NS = SPEED_OF_LIGHT * 1e-9


@dataclass(frozen=True)
class PmSetting:
    """Idler projective-measurement station: optional QWP, then HWP, then PBS."""
    hwp_angle: float
    qwp_present: bool = False
    qwp_angle: float = 45.0

    def __post_init__(self):
        object.__setattr__(self, "hwp_angle", float(self.hwp_angle) % 180.0)
        object.__setattr__(self, "qwp_angle", float(self.qwp_angle) % 180.0)

    def waveplates(self) -> list[WaveplateSetting]:
        plates = []
        if self.qwp_present:
            plates.append(WaveplateSetting(WaveplateKind.QWP, self.qwp_angle))
        plates.append(WaveplateSetting(WaveplateKind.HWP, self.hwp_angle))
        return plates


class SwitchModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    isolation_db: float = Field(20.0, gt=0.0, description="cross-talk suppression between output ports")
    insertion_loss_db: float = Field(1.3, ge=0.0, description="loss through one switch")
    response_time_ns: float = Field(60.0, ge=0.0, description="time from trigger to settled routing")
    max_duty_cycle_hz: float = Field(1.0e6, gt=0.0, description="highest re-trigger rate")

    @property
    def leak_probability(self) -> float:
        return 10.0 ** (-self.isolation_db / 10.0)


class TimingBudget(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    detector_to_ttm_ns: float = Field(160.0, ge=0.0)
    ttm_processing_ns: float = Field(300.0, ge=0.0)
    signal_propagation_ns: float = Field(100.0, ge=0.0)
    delay_fiber_m: float = Field(162.0, ge=0.0, description="signal delay line length")
    fiber_index: float = Field(1.468, ge=1.0, description="group index of the delay fiber")
    gate_duration_ns: float = Field(700.0, gt=0.0, description="how long the switch holds the cross state")
    detector_deadtime_ns: float = Field(50.0, gt=0.0)
    interswitch_transit_ns: float = Field(10.0, ge=0.0, description="time for the signal to cross U_B between switches")

    @property
    def latency_ns(self) -> float:
        return self.detector_to_ttm_ns + self.ttm_processing_ns + self.signal_propagation_ns

    @property
    def delay_ns(self) -> float:
        return self.delay_fiber_m * self.fiber_index / SPEED_OF_LIGHT_M_PER_NS


class LossComponent(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str
    db: float = Field(ge=0.0)


class FeedForwardImperfections(BaseModel):
    """Imperfections that act only on the feed-forward path, not on the source."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    miscalibration_deg: float = Field(0.5, description="offset on every correction waveplate")
    pdl_fraction: float = Field(0.01, ge=0.0, lt=1.0)
    chi_signal: float = Field(0.2, description="uncompensated birefringence on the signal path")
    leak_probability: Optional[float] = Field(0.0, ge=0.0, lt=1.0, description="None uses the switch isolation")
