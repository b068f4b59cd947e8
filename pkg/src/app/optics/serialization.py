from __future__ import annotations

from typing import Any, Dict

import numpy as np

from app.optics.states import DensityMatrix, PureState2
from app.utils.exceptions import StateValidationError

# rounding keeps sidecar files byte-stable across BLAS builds
JSON_DECIMALS = 12


def _pair(value: complex) -> list[float]:
    value = complex(value)
    real = round(value.real, JSON_DECIMALS) + 0.0
    imag = round(value.imag, JSON_DECIMALS) + 0.0
    return [real, imag]


def density_to_dict(rho: DensityMatrix) -> Dict[str, Any]:
    return {
        "dim": rho.dim,
        "entries": [[_pair(entry) for entry in row] for row in rho.matrix],
    }


def density_from_dict(payload: Dict[str, Any]) -> DensityMatrix:
    try:
        entries = np.array([[complex(re, im) for re, im in row] for row in payload["entries"]])
    except (KeyError, TypeError, ValueError) as e:
        raise StateValidationError(f"malformed density matrix payload: {e}") from e
    if entries.shape[0] != payload.get("dim", entries.shape[0]):
        raise StateValidationError("declared dim does not match entries")
    return DensityMatrix.from_operator(entries)


def pure_to_dict(state: PureState2) -> Dict[str, Any]:
    canonical = state.canonical()
    return {"amp_h": _pair(canonical.amp_h), "amp_v": _pair(canonical.amp_v)}


def pure_from_dict(payload: Dict[str, Any]) -> PureState2:
    try:
        vector = [complex(*payload["amp_h"]), complex(*payload["amp_v"])]
    except (KeyError, TypeError, ValueError) as e:
        raise StateValidationError(f"malformed pure state payload: {e}") from e
    return PureState2.from_vector(vector)
