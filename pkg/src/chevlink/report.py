"""Run reports: the stable machine-readable result of every command.

Non-timing fields are deterministic for identical inputs; serialization
sorts keys so reports are byte-comparable.  Timings live under "timings"
and are excluded from any determinism guarantee.
"""

from __future__ import annotations

import json
import time

__version__ = "0.1.0"
SCHEMA_VERSION = 1


class RunReport:
    def __init__(self, command: str, configuration: dict):
        self.command = command
        self.configuration = configuration
        self.data: dict = {}
        self.timings: dict = {}
        self._t0 = time.monotonic()

    def time_section(self, name: str):
        report = self

        class _Timer:
            def __enter__(self):
                self.start = time.monotonic()
                return self

            def __exit__(self, *exc):
                report.timings[name] = round(time.monotonic() - self.start, 3)
                return False

        return _Timer()

    def finish(self, passed: bool | None = None) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "command": self.command,
            "configuration": self.configuration,
            **self.data,
            "timings": {**self.timings,
                        "total": round(time.monotonic() - self._t0, 3)},
        }
        if passed is not None:
            out["passed"] = passed
        return out


def stable_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=str)
