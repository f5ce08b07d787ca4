"""
Check results and report rendering (json or a pandas text table).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, TextIO

import pandas as pd

REPORT_VERSION = 1
STATUSES = ("pass", "fail", "partial", "no-op")


@dataclass
class CheckResult:
    name: str
    status: str
    details: Dict[str, Any] = field(default_factory=dict)
    witness: Optional[Dict[str, Any]] = None

    def __post_init__(self) -> None:
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def failed(self) -> bool:
        return self.status == "fail"

    @classmethod
    def from_validation(cls, name: str, report: Any, **details: Any) -> "CheckResult":
        """Wrap anything with `.passed` and `.to_dict()` (validation/continuity reports)."""
        data = report.to_dict()
        witness = data.pop("witness", None)
        if isinstance(witness, list):
            witness = {"violations": witness}
        data.pop("status", None)
        data.update(details)
        return cls(name, "pass" if report.passed else "fail", data, witness)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"name": self.name, "status": self.status, "details": self.details}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class Report:
    command: str
    checks: List[CheckResult] = field(default_factory=list)
    meta: Dict[str, Any] = field(default_factory=dict)

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check

    def extend(self, checks: Iterable[CheckResult]) -> None:
        self.checks.extend(checks)

    @property
    def status(self) -> str:
        if not self.checks:
            return "no-op"
        if any(c.failed for c in self.checks):
            return "fail"
        return "pass"

    @property
    def partial(self) -> bool:
        return any(c.status == "partial" for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 1 if self.status == "fail" else 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "version": REPORT_VERSION,
            "status": self.status,
            "command": self.command,
            "partial": self.partial,
            "meta": self.meta,
            "checks": [c.to_dict() for c in self.checks],
        }


def _jsonable(value: Any) -> Any:
    # numpy scalars and arrays sneak into details
    if hasattr(value, "tolist"):
        return value.tolist()
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    raise TypeError(f"not JSON serialisable: {type(value).__name__}")


def render_json(report: Report) -> str:
    return json.dumps(report.to_dict(), ensure_ascii=False, indent=2, default=_jsonable)


def render_text(report: Report) -> str:
    lines = [f"{report.command}: {report.status}{' (partial)' if report.partial else ''}"]
    for key, value in report.meta.items():
        lines.append(f"  {key}: {value}")
    if report.checks:
        table = pd.DataFrame(
            [
                {
                    "check": c.name,
                    "status": c.status,
                    "details": ", ".join(f"{k}={v}" for k, v in c.details.items()),
                }
                for c in report.checks
            ]
        )
        lines.append(table.to_string(index=False))
    for c in report.checks:
        if c.witness is not None:
            lines.append(f"[witness] {c.name}: {json.dumps(c.witness, ensure_ascii=False, default=_jsonable)}")
    return "\n".join(lines)


def emit_report(report: Report, fmt: str = "text", stream: Optional[TextIO] = None) -> str:
    text = render_json(report) if fmt == "json" else render_text(report)
    if stream is not None:
        stream.write(text + "\n")
    return text
