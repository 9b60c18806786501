"""JSON reporter: deterministic report output."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel

from nclebesgue.core.schema import Report

FLOAT_DIGITS = 12
ZERO_FLOOR = 1e-12


def _round(x: float, digits: int, floor: float) -> float | str:
    if math.isnan(x) or math.isinf(x):
        return str(x)
    if abs(x) < floor:
        return 0.0
    return float(f"{x:.{digits}g}")


def normalize(obj: Any, digits: int = FLOAT_DIGITS, floor: float = ZERO_FLOOR) -> Any:
    """Plain JSON types with floats rounded to ``digits`` significant digits.

    Magnitudes below ``floor`` become 0.0 and complex numbers become ``[re, im]``.
    """
    if isinstance(obj, BaseModel):
        return normalize(obj.model_dump(), digits, floor)
    if isinstance(obj, dict):
        return {str(k): normalize(v, digits, floor) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v, digits, floor) for v in obj]
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist(), digits, floor)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj), digits, floor)
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return [_round(z.real, digits, floor), _round(z.imag, digits, floor)]
    if isinstance(obj, Path):
        return obj.name
    return obj


class JsonReporter:
    """Reporter that writes sorted-key, indented JSON with a trailing newline."""

    format_name: str = "json"

    def __init__(self, digits: int = FLOAT_DIGITS, floor: float = ZERO_FLOOR) -> None:
        self._digits = digits
        self._floor = floor

    def render(self, report: Report) -> str:
        data = normalize(report.model_dump(), self._digits, self._floor)
        return json.dumps(data, sort_keys=True, indent=2) + "\n"

    def write(self, report: Report, output: Path) -> None:
        """Write the report as JSON to the output path."""
        output = Path(output).resolve()
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(self.render(report), encoding="utf-8")
