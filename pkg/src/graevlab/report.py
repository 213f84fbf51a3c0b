"""Run reports: per-check outcomes, exit codes, JSON and CSV output."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_INCONCLUSIVE = 3


@dataclass
class Tally:
    """Outcome of one property over many trials; keeps the first failing witness."""

    name: str
    trials: int = 0
    failures: int = 0
    undecided: int = 0
    margin: float | None = None
    witness: Any = None
    detail: str = ""

    def record(self, ok: bool | None, witness=None, margin: float | None = None) -> bool | None:
        self.trials += 1
        if margin is not None:
            self.margin = margin if self.margin is None else min(self.margin, margin)
        if ok is None:
            self.undecided += 1
            if self.witness is None and not self.failures:
                self.witness = witness() if callable(witness) else witness
        elif not ok:
            if not self.failures:
                self.witness = witness() if callable(witness) else witness
            self.failures += 1
        return ok

    @property
    def status(self) -> str:
        if self.failures:
            return FAIL
        if self.undecided:
            return INCONCLUSIVE
        return PASS

    def to_json(self) -> dict:
        out = {"name": self.name, "status": self.status, "trials": self.trials}
        if self.failures:
            out["failures"] = self.failures
        if self.undecided:
            out["undecided"] = self.undecided
        if self.margin is not None:
            out["margin"] = self.margin
        if self.witness is not None:
            out["witness"] = self.witness
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class RunReport:
    command: list[str]
    seed: int | None = None
    inputs: dict[str, str] = field(default_factory=dict)
    checks: list[dict] = field(default_factory=list)
    result: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def add(self, name: str, status: str, margin: float | None = None, witness=None,
            detail: str = "", **extra) -> None:
        entry = {"name": name, "status": status}
        if margin is not None:
            entry["margin"] = margin
        if witness is not None:
            entry["witness"] = witness
        if detail:
            entry["detail"] = detail
        entry.update(extra)
        self.checks.append(entry)

    def expect(self, name: str, ok: bool, witness=None, margin: float | None = None,
               detail: str = "") -> bool:
        self.add(name, PASS if ok else FAIL, margin, None if ok else witness, detail)
        return ok

    def add_tally(self, tally: Tally) -> None:
        self.checks.append(tally.to_json())

    @property
    def status(self) -> str:
        states = {c["status"] for c in self.checks}
        if FAIL in states:
            return FAIL
        if INCONCLUSIVE in states:
            return INCONCLUSIVE
        return PASS

    @property
    def exit_code(self) -> int:
        return {PASS: EXIT_OK, FAIL: EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}[self.status]

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "seed": self.seed,
            "inputs": dict(sorted(self.inputs.items())),
            "status": self.status,
            "checks": self.checks,
            "result": self.result,
            "wall_time": round(self.wall_time, 3),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2, default=str)

    def csv_summary(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "status", "trials", "margin"])
        for c in self.checks:
            writer.writerow([c["name"], c["status"], c.get("trials", 1),
                             "" if c.get("margin") is None else repr(c["margin"])])
        return buf.getvalue()
