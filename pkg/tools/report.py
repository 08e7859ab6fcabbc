"""
Machine-readable reports.

JSON schema: { version, config, seed, tables: {...}, checks: [{name, pass, residual}] }.
Floats are written with repr, the shortest text that round-trips, in both
JSON and CSV, so the two renderings of a run carry identical numbers.
"""

import csv
import io
import json
import math
import sys
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

TOOL_VERSION = "0.1.0"


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "pass": self.passed, "residual": _finite(self.residual)}


def _finite(x: float) -> float | str:
    # JSON has no inf/nan
    x = float(x)
    return x if math.isfinite(x) else repr(x)


def build_report(
    config: dict[str, Any], seed: int, tables: dict[str, Any], checks: Sequence[Check]
) -> dict[str, Any]:
    return {
        "version": TOOL_VERSION,
        "config": config,
        "seed": seed,
        "tables": tables,
        "checks": [c.to_dict() for c in checks],
    }


def _json_safe(value: Any) -> Any:
    if isinstance(value, float):
        return _finite(value)
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_json_safe(v) for v in value]
    return value


def render_json(report: dict[str, Any]) -> str:
    return json.dumps(_json_safe(report), indent=2, allow_nan=False) + "\n"


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


def write_output(text: str, output: str | None) -> None:
    """Write to `output`, or stdout when it is None or '-'."""
    if output in (None, "-"):
        sys.stdout.write(text)
        return
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
