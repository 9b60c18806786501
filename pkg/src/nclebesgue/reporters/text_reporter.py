"""Plain-text summary of a report."""

from __future__ import annotations

from pathlib import Path
from typing import Any

from nclebesgue.core.schema import Report
from nclebesgue.reporters.json_reporter import FLOAT_DIGITS, ZERO_FLOOR, normalize


def _lines(value: Any, indent: int) -> list[str]:
    pad = "  " * indent
    out: list[str] = []
    if isinstance(value, dict):
        for key in sorted(value):
            item = value[key]
            if _flat(item):
                out.append(f"{pad}{key}: {_inline(item)}")
            else:
                out.append(f"{pad}{key}:")
                out.extend(_lines(item, indent + 1))
        return out
    if isinstance(value, list):
        for item in value:
            if _flat(item):
                out.append(f"{pad}- {_inline(item)}")
            else:
                out.append(f"{pad}-")
                out.extend(_lines(item, indent + 1))
        return out
    return [f"{pad}{_inline(value)}"]


def _flat(value: Any) -> bool:
    if isinstance(value, dict):
        return not value
    if isinstance(value, list):
        return all(not isinstance(v, (dict, list)) or _pair(v) for v in value)
    return True


def _pair(value: Any) -> bool:
    return isinstance(value, list) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value)


def _inline(value: Any) -> str:
    if isinstance(value, list):
        return "[" + ", ".join(_inline(v) for v in value) + "]"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if value is None:
        return "-"
    return str(value)


class TextReporter:
    """Human summary: one line per check, then the sections."""

    format_name: str = "text"

    def __init__(self, digits: int = FLOAT_DIGITS, floor: float = ZERO_FLOOR) -> None:
        self._digits = digits
        self._floor = floor

    def render(self, report: Report) -> str:
        data = normalize(report.model_dump(), self._digits, self._floor)
        lines = [f"command: {data['command']}"]
        for check in data["checks"]:
            status = "PASS" if check["passed"] else "FAIL"
            residual = "" if check["residual"] is None else f" ({check['residual']})"
            lines.append(f"{check['name']}: {status}{residual}")
        for name in sorted(data["sections"]):
            lines.append(f"[{name}]")
            lines.extend(_lines(data["sections"][name], 1))
        summary = data["summary"]
        verdict = "PASS" if summary.get("passed") else "FAIL"
        lines.append(f"summary: {verdict} (exit code {summary.get('exit_code', 0)})")
        return "\n".join(lines) + "\n"

    def write(self, report: Report, output: Path) -> None:
        output = Path(output).resolve()
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(self.render(report), encoding="utf-8")
