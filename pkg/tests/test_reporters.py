"""Tests for the built-in report formats (JSON, text)."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from nclebesgue.core.exceptions import RegistryError
from nclebesgue.core.registry import ComponentRegistry
from nclebesgue.core.schema import CheckResult, Report
from nclebesgue.reporters import JsonReporter, TextReporter, register_builtin_reporters


def _sample_report() -> Report:
    return Report(
        command="decompose m2_pair.json --mu mu --lambda pure",
        sections={
            "decompose": {
                "label": "GK",
                "mu_ac": {"norm": 0.375, "spectrum": np.array([0.375, 0.0])},
                "verdicts": {"absolutely_continuous": False, "domination_bound": None},
            }
        },
        checks=[
            CheckResult(name="exact_additivity", passed=True, residual=0.0),
            CheckResult(name="parts_singular", passed=False, residual=0.5),
            CheckResult(name="label", passed=True),
        ],
        summary={"exit_code": 3, "passed": False},
    )


# ---------------------------------------------------------------------------
# Registration
# ---------------------------------------------------------------------------


class TestRegistration:
    def test_all_reporters_registered(self) -> None:
        reg = ComponentRegistry()
        register_builtin_reporters(reg)
        assert reg.list_available()["reporters"] == ["json", "text"]

    def test_reporter_options_forwarded(self) -> None:
        reg = ComponentRegistry()
        register_builtin_reporters(reg)
        reporter = reg.get_reporter("json", digits=4, floor=1e-6)
        assert isinstance(reporter, JsonReporter)
        assert '"norm": 0.375' in reporter.render(_sample_report())

    def test_unknown_format(self) -> None:
        reg = ComponentRegistry()
        register_builtin_reporters(reg)
        with pytest.raises(RegistryError):
            reg.get_reporter("sarif")


# ---------------------------------------------------------------------------
# Text reporter
# ---------------------------------------------------------------------------


class TestTextReporter:
    def test_layout(self) -> None:
        lines = TextReporter().render(_sample_report()).splitlines()
        assert lines[0] == "command: decompose m2_pair.json --mu mu --lambda pure"
        assert lines[1] == "exact_additivity: PASS (0.0)"
        assert lines[2] == "parts_singular: FAIL (0.5)"
        assert lines[3] == "label: PASS"
        assert lines[4] == "[decompose]"
        assert lines[-1] == "summary: FAIL (exit code 3)"

    def test_nested_sections(self) -> None:
        text = TextReporter().render(_sample_report())
        assert "  label: GK" in text
        assert "  mu_ac:" in text
        assert "    spectrum: [0.375, 0.0]" in text
        assert "    absolutely_continuous: no" in text
        assert "    domination_bound: -" in text

    def test_write(self, tmp_path: Path) -> None:
        out = tmp_path / "out" / "report.txt"
        TextReporter().write(_sample_report(), out)
        assert out.read_text(encoding="utf-8") == TextReporter().render(_sample_report())

    def test_deterministic(self) -> None:
        assert TextReporter().render(_sample_report()) == TextReporter().render(_sample_report())
