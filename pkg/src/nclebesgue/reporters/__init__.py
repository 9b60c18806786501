"""Built-in report formats."""

from nclebesgue.reporters.json_reporter import JsonReporter, normalize
from nclebesgue.reporters.text_reporter import TextReporter


def register_builtin_reporters(registry) -> None:
    """Register built-in reporters on the given registry."""
    registry.register_reporter("json", JsonReporter)
    registry.register_reporter("text", TextReporter)


__all__ = [
    "JsonReporter",
    "TextReporter",
    "normalize",
    "register_builtin_reporters",
]
