"""Forward model (Born rule), count sampling and the count-file format."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from app.optics.states import DensityMatrix
from app.tomography.suites import Analyzer, TomographySetting, projectors_for
from app.utils.enums import Arm, NoiseModel
from app.utils.exceptions import ConfigError, DimensionMismatchError, SimulationError
from app.utils.utilities import Utilities

CSV_COLUMNS = (
    "setting_id", "arm", "hwp_deg", "qwp_deg", "idler_hwp_deg", "idler_qwp_deg",
    "c_hh", "c_hv", "c_vh", "c_vv",
)

SeedLike = Union[int, np.random.Generator]


@dataclass(frozen=True)
class CountRecord:
    setting: TomographySetting
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) != len(self.setting.labels):
            raise DimensionMismatchError(
                f"{len(self.setting.labels)} outcomes expected, got {len(counts)} counts"
            )
        if any(c < 0 for c in counts):
            raise SimulationError(f"negative counts {counts}")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def count(self, label: str) -> int:
        return self.counts[self.setting.labels.index(label.upper())]

    @property
    def c_h(self) -> int:
        return self.count("H")

    @property
    def c_v(self) -> int:
        return self.count("V")

    @property
    def c_hh(self) -> int:
        return self.count("HH")

    @property
    def c_hv(self) -> int:
        return self.count("HV")

    @property
    def c_vh(self) -> int:
        return self.count("VH")

    @property
    def c_vv(self) -> int:
        return self.count("VV")


def probabilities_from_state(rho: DensityMatrix, settings: Sequence[TomographySetting]) -> np.ndarray:
    """Born probabilities, one row per setting in outcome-label order."""
    rows = []
    for setting in settings:
        if setting.dim != rho.dim:
            raise DimensionMismatchError(f"setting acts on dimension {setting.dim}, state has {rho.dim}")
        rows.append([np.real(np.trace(projector @ rho.matrix)) for _, projector in projectors_for(setting)])
    return np.array(rows, dtype=float)


def _generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_counts(
    settings: Sequence[TomographySetting],
    probabilities: np.ndarray,
    n_per_setting: int,
    seed: SeedLike,
    model: NoiseModel = NoiseModel.MULTINOMIAL,
) -> list[CountRecord]:
    """
    Draw detection counts for each setting.

    Args:
        settings: tomography settings, aligned with the rows of probabilities
        probabilities: one row of outcome probabilities per setting
        n_per_setting: events per setting (multinomial) or mean events per setting (poisson)
        seed: integer seed or an existing generator
        model: multinomial (fixed events per basis) or independent poisson per outcome

    Returns:
        One CountRecord per setting
    """
    if n_per_setting <= 0:
        raise SimulationError("n_per_setting must be positive")
    rng = _generator(seed)
    model = NoiseModel(model)
    records = []
    for setting, row in zip(settings, np.atleast_2d(probabilities), strict=True):
        p = np.clip(np.asarray(row, dtype=float), 0.0, None)
        total = p.sum()
        if total <= 0:
            raise SimulationError(f"setting {setting} has no outcome with positive probability")
        p = p / total
        if model is NoiseModel.MULTINOMIAL:
            counts = rng.multinomial(n_per_setting, p)
        else:
            counts = rng.poisson(n_per_setting * p)
        records.append(CountRecord(setting, tuple(counts)))
    return records


def estimate_probs(record: CountRecord) -> np.ndarray:
    total = record.total
    if total <= 0:
        raise SimulationError(f"setting {record.setting} has zero total counts")
    return np.array(record.counts, dtype=float) / total


def _angle(value: float) -> str:
    return f"{value:g}"


def write_counts_csv(records: Sequence[CountRecord], path: Path | str) -> Path:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for setting_id, record in enumerate(records):
        setting = record.setting
        if setting.idler is None:
            idler_cols = ["", ""]
            count_cols = [record.c_h, record.c_v, "", ""]
        else:
            idler_cols = [_angle(setting.idler.hwp_deg), _angle(setting.idler.qwp_deg)]
            count_cols = list(record.counts)
        writer.writerow(
            [setting_id, setting.arm, _angle(setting.signal.hwp_deg), _angle(setting.signal.qwp_deg)]
            + idler_cols + count_cols
        )
    return Utilities.atomic_write_text(path, buffer.getvalue())


def _parse_row(row: dict, line: int) -> CountRecord:
    try:
        arm = (row.get("arm") or "").strip().lower()
        signal = Analyzer(float(row["hwp_deg"]), float(row["qwp_deg"]))
        if arm in (Arm.SIGNAL.value, Arm.IDLER.value):
            setting = TomographySetting(signal=signal)
            counts = (int(row["c_hh"]), int(row["c_hv"]))
        elif arm == "both":
            idler = Analyzer(float(row["idler_hwp_deg"]), float(row["idler_qwp_deg"]))
            setting = TomographySetting(signal=signal, idler=idler)
            counts = tuple(int(row[name]) for name in ("c_hh", "c_hv", "c_vh", "c_vv"))
        else:
            raise ValueError(f"unknown arm {arm!r}")
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"malformed count row: {e}", line=line) from e
    try:
        return CountRecord(setting, counts)
    except (SimulationError, DimensionMismatchError) as e:
        raise ConfigError(str(e), line=line) from e


def read_counts_csv(path: Path | str) -> list[CountRecord]:
    """Parse a count file; all rows must describe the same photon number."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        missing = [c for c in CSV_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ConfigError(f"count file {path} lacks columns {missing}", line=1)
        records = [_parse_row(row, reader.line_num) for row in reader]
    if not records:
        raise ConfigError(f"count file {path} has no rows")
    dims = {record.setting.dim for record in records}
    if len(dims) > 1:
        raise ConfigError(f"count file {path} mixes single-photon and coincidence rows")
    return records
