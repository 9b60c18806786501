"""Protocol for report output formats."""

from __future__ import annotations

from pathlib import Path
from typing import Protocol

from nclebesgue.core.schema import Report


class Reporter(Protocol):
    """Protocol for output formats (JSON, text)."""

    format_name: str

    def render(self, report: Report) -> str:
        """Return the report as text."""
        ...

    def write(self, report: Report, output: Path) -> None:
        """Write the rendered report to output path."""
        ...
