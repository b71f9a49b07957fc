"""Verification reports: check records, summary counts and a canonical JSON form."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import metadata

import numpy as np

PASS = "pass"
FAIL = "fail"
REPORTED = "reported"
STATUSES = (PASS, FAIL, REPORTED)


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0.0.0+local"


@dataclass
class Check:
    id: str
    anchor: str
    status: str
    deviation: float
    tolerance: float | None
    detail: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    def as_dict(self) -> dict:
        out = {
            "id": self.id,
            "anchor": self.anchor,
            "status": self.status,
            "deviation": self.deviation,
            "tolerance": self.tolerance,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class Report:
    command: str
    config: dict
    checks: list[Check] = field(default_factory=list)
    sections: dict = field(default_factory=dict)

    def add(
        self, id: str, anchor: str, deviation: float, tolerance: float | None = None, *,
        reported: bool = False, passed: bool | None = None, **detail,
    ) -> Check:
        """Record a check.

        Status is ``reported`` when ``reported`` is set, otherwise ``pass``
        when ``passed`` (default: ``deviation <= tolerance``) holds.
        """
        if any(c.id == id for c in self.checks):
            raise ValueError(f"duplicate check id {id!r}")
        deviation = float(deviation)
        if reported:
            status = REPORTED
        else:
            if passed is None:
                passed = tolerance is not None and math.isfinite(deviation) and deviation <= tolerance
            status = PASS if passed else FAIL
        chk = Check(id, anchor, status, deviation, tolerance, detail)
        self.checks.append(chk)
        return chk

    def get(self, id: str) -> Check:
        for c in self.checks:
            if c.id == id:
                return c
        raise KeyError(id)

    def summary(self) -> dict:
        counts = {s: 0 for s in STATUSES}
        for c in self.checks:
            counts[c.status] += 1
        counts["total"] = len(self.checks)
        return counts

    @property
    def exit_code(self) -> int:
        return 1 if any(c.status == FAIL for c in self.checks) else 0

    def as_dict(self) -> dict:
        out = {
            "tool": "dsgeom",
            "version": tool_version(),
            "command": self.command,
            "config": self.config,
            "summary": self.summary(),
            "checks": [c.as_dict() for c in self.checks],
        }
        if self.sections:
            out["sections"] = self.sections
        return out

    def to_json(self) -> str:
        return dumps(self.as_dict())


def _clean(obj):
    # JSON has no NaN/inf; keep them readable and the document strict
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def dumps(obj) -> str:
    """Canonical serialisation: insertion-ordered keys, two-space indent, trailing newline."""
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"
