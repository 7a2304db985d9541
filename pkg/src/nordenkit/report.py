"""Verification reports: ordered check records with text and JSON output."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

SCHEMA_VERSION = 1

PASS = "PASS"
FAIL = "FAIL"
EXPECTED_FAILURE = "EXPECTED-FAILURE"
SKIPPED = "SKIPPED-HYPOTHESIS"


def _plain(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.floating, float)):
        return float(value) if np.isfinite(value) else None
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


@dataclass
class CheckRecord:
    name: str
    paper_anchor: str
    residual: float
    tolerance: float
    verdict: str
    seed: int | None = None
    parameters: dict = field(default_factory=dict)
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == PASS


@dataclass
class VerificationReport:
    """Ordered list of check records.

    The overall verdict is the conjunction of all records except those marked
    as expected failures.  Skipped records count as failures: a skipped check
    means an upstream hypothesis did not hold.
    """

    title: str = ""
    seed: int | None = None
    records: list[CheckRecord] = field(default_factory=list)

    def add(
        self,
        name: str,
        residual: float,
        tolerance: float,
        *,
        anchor: str = "",
        passed: bool | None = None,
        expected_failure: bool = False,
        parameters: dict | None = None,
        seed: int | None = None,
        note: str = "",
    ) -> CheckRecord:
        residual = float(residual)
        if passed is None:
            passed = bool(np.isfinite(residual) and residual <= tolerance)
        if expected_failure:
            verdict = EXPECTED_FAILURE if not passed else FAIL
            if passed:
                note = (note + "; " if note else "") + "expected a failure but the check passed"
        else:
            verdict = PASS if passed else FAIL
        rec = CheckRecord(
            name=name,
            paper_anchor=anchor,
            residual=residual,
            tolerance=float(tolerance),
            verdict=verdict,
            seed=self.seed if seed is None else seed,
            parameters=_plain(parameters or {}),
            note=note,
        )
        self.records.append(rec)
        return rec

    def skip(self, name: str, *, anchor: str = "", reason: str = "", parameters: dict | None = None) -> CheckRecord:
        rec = CheckRecord(name, anchor, float("nan"), float("nan"), SKIPPED, self.seed, _plain(parameters or {}), reason)
        self.records.append(rec)
        return rec

    def extend(self, other: "VerificationReport") -> None:
        self.records.extend(other.records)

    @property
    def passed(self) -> bool:
        return all(r.verdict in (PASS, EXPECTED_FAILURE) for r in self.records)

    def __getitem__(self, name: str) -> CheckRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def names(self) -> list[str]:
        return [r.name for r in self.records]

    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if r.verdict not in (PASS, EXPECTED_FAILURE)]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "title": self.title,
            "seed": self.seed,
            "passed": self.passed,
            "records": [_plain(asdict(r)) for r in self.records],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False)

    def to_text(self) -> str:
        lines = [f"# {self.title}" if self.title else "# verification report", f"# seed: {self.seed}"]
        for r in self.records:
            line = f"{r.name}: {r.verdict}  (residual {r.residual:.3e}, tol {r.tolerance:.1e})"
            if r.note:
                line += f"  [{r.note}]"
            lines.append(line)
        lines.append(f"# overall: {'PASS' if self.passed else 'FAIL'} ({len(self.records)} records)")
        return "\n".join(lines)
