"""Check rows and reports, serialized as JSON."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

PASS, FAIL, NOT_FALSIFIED, SKIPPED = "pass", "fail", "not-falsified", "skipped"


def _clean(obj: Any) -> Any:
    """Convert numpy values and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


@dataclass
class Check:
    """One verified statement.

    ``max_violation`` is the largest amount by which the checked inequality
    fails (negative values are slack). The row fails exactly when it exceeds
    ``tolerance + allowance``.
    """

    name: str
    paper_ref: str
    status: str
    max_violation: float
    tolerance: float
    allowance: float = 0.0
    witness: Any = None
    notes: str = ""
    data: dict = field(default_factory=dict)

    @classmethod
    def measure(cls, name: str, paper_ref: str, max_violation: float, tolerance: float,
                allowance: float = 0.0, witness=None, notes: str = "",
                ok_status: str = PASS, **data) -> "Check":
        mv = float(max_violation)
        failed = mv > tolerance + allowance or math.isnan(mv)
        return cls(name, paper_ref, FAIL if failed else ok_status, mv, float(tolerance),
                   float(allowance), witness, notes, data)

    @classmethod
    def skipped(cls, name: str, paper_ref: str, notes: str) -> "Check":
        return cls(name, paper_ref, SKIPPED, float("nan"), 0.0, 0.0, None, notes)

    @property
    def passed(self) -> bool:
        return self.status != FAIL

    def to_dict(self) -> dict:
        return _clean({
            "name": self.name,
            "paper_ref": self.paper_ref,
            "status": self.status,
            "max_violation": self.max_violation,
            "tolerance": self.tolerance,
            "allowance": self.allowance,
            "witness": self.witness,
            "notes": self.notes,
            "data": self.data,
        })


@dataclass
class CheckReport:
    scenario: str
    checks: list[Check] = field(default_factory=list)
    seed: int | None = None
    wall_time: float = 0.0
    meta: dict = field(default_factory=dict)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def extend(self, other: "CheckReport", prefix: str = "") -> None:
        for c in other.checks:
            if prefix:
                c.name = f"{prefix}.{c.name}"
            self.checks.append(c)

    @property
    def summary(self) -> dict[str, int]:
        counts = {PASS: 0, FAIL: 0, NOT_FALSIFIED: 0, SKIPPED: 0}
        for c in self.checks:
            counts[c.status] = counts.get(c.status, 0) + 1
        counts["total"] = len(self.checks)
        return counts

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return _clean({
            "scenario": self.scenario,
            "seed": self.seed,
            "checks": [c.to_dict() for c in self.checks],
            "summary": self.summary,
            "meta": self.meta,
            "wall_time": self.wall_time,
        })

    def to_json(self, include_wall_time: bool = True) -> str:
        d = self.to_dict()
        if not include_wall_time:
            d.pop("wall_time")
        return json.dumps(d, indent=2, allow_nan=False) + "\n"

    def table(self) -> str:
        lines = []
        for c in self.checks:
            lines.append(f"{c.status:<14} {c.name:<48} viol={c.max_violation:.3e} "
                         f"tol={c.tolerance:.1e} allow={c.allowance:.1e}")
        s = self.summary
        lines.append(f"-- {self.scenario}: {s[PASS]} pass, {s[NOT_FALSIFIED]} not-falsified, "
                     f"{s[FAIL]} fail, {s[SKIPPED]} skipped")
        return "\n".join(lines)
