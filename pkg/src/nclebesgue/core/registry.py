"""Name tables for the analysis stages and report formats."""

from __future__ import annotations

import logging

from nclebesgue.core.exceptions import RegistryError
from nclebesgue.protocols import PipelineStage, Reporter

log = logging.getLogger(__name__)


class ComponentRegistry:
    """Stage and reporter classes by name; lookups return fresh instances."""

    def __init__(self) -> None:
        self._reporters: dict[str, type[Reporter]] = {}
        self._stages: dict[str, type[PipelineStage]] = {}

    @staticmethod
    def _put(table: dict[str, type], kind: str, name: str, cls: type) -> None:
        if name in table:
            log.warning("Overwriting %s registration: %s", kind, name)
        table[name] = cls

    @staticmethod
    def _find(table: dict[str, type], label: str, name: str) -> type:
        try:
            return table[name]
        except KeyError:
            known = ", ".join(table) or "none"
            raise RegistryError(f"Unknown {label}: {name} (available: {known})") from None

    def register_reporter(self, fmt: str, cls: type[Reporter]) -> None:
        self._put(self._reporters, "reporter", fmt, cls)

    def register_stage(self, name: str, cls: type[PipelineStage]) -> None:
        self._put(self._stages, "stage", name, cls)

    def get_reporter(self, fmt: str, **options: object) -> Reporter:
        """Reporter for ``fmt``; ``options`` (digits, floor) go to its constructor."""
        return self._find(self._reporters, "reporter format", fmt)(**options)

    def get_stage(self, name: str) -> PipelineStage:
        return self._find(self._stages, "pipeline stage", name)()

    def list_available(self) -> dict[str, list[str]]:
        """Registered names per category, in registration order."""
        return {"reporters": list(self._reporters), "stages": list(self._stages)}
