from __future__ import annotations

import csv
import io
from pathlib import Path

from app.montecarlo.sweep import SweepResult
from app.optics.serialization import density_to_dict, pure_to_dict
from app.utils.utilities import Utilities

SWEEP_COLUMNS = ("bloch_angle_deg", "fid_mean", "fid_sigma", "purity_mean")


def sweep_basename(result: SweepResult) -> str:
    return f"sweep_{result.plane.value}_ff-{'on' if result.feedforward else 'off'}"


def sweep_to_csv(result: SweepResult) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    fmt = Utilities.fmt6
    for point in result.points:
        writer.writerow([fmt(point.bloch_angle), fmt(point.fidelity_mean), fmt(point.fidelity_sigma), fmt(point.purity_mean)])
    return buffer.getvalue()


def sweep_to_json(result: SweepResult) -> str:
    payload = {
        "plane": result.plane.value,
        "feedforward": result.feedforward,
        "mean_fidelity": round(result.mean_fidelity, 12),
        "points": [
            {
                "bloch_angle_deg": round(point.bloch_angle, 12),
                "hwp_deg": round(point.setting.hwp_angle, 12),
                "qwp_deg": round(point.setting.qwp_angle, 12) if point.setting.qwp_present else None,
                "target": pure_to_dict(point.target),
                "fid_mean": round(point.fidelity_mean, 12),
                "fid_sigma": round(point.fidelity_sigma, 12),
                "purity_mean": round(point.purity_mean, 12),
                "reconstructed_state": density_to_dict(point.reconstructed_state),
            }
            for point in result.points
        ],
    }
    return Utilities.to_json(payload)


def write_sweep(result: SweepResult, out_dir: Path | str) -> tuple[Path, Path]:
    """Write the CSV and its JSON sidecar, each through a temp-file rename."""
    out_dir = Path(out_dir)
    base = sweep_basename(result)
    csv_path = Utilities.atomic_write_text(out_dir / f"{base}.csv", sweep_to_csv(result))
    json_path = Utilities.atomic_write_text(out_dir / f"{base}.json", sweep_to_json(result))
    return csv_path, json_path
