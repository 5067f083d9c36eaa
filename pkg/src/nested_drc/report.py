"""Verification reports and their three serialisations (human, CSV, JSON)."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any

from .numeric import fmt_exact, fmt_real


@dataclass
class Check:
    """One inequality (or identity) evaluated on a concrete instance.

    ``passed`` is ``None`` when the check was skipped because its hypothesis
    failed.  Only ``asserted`` checks influence :attr:`Report.ok`.
    """

    name: str
    anchor: str
    relation: str
    lhs: Any
    rhs: Any
    passed: bool | None
    asserted: bool = True
    params: dict = field(default_factory=dict)
    note: str = ""

    @property
    def status(self) -> str:
        if self.passed is None:
            return "SKIP"
        if not self.asserted:
            return "HOLDS" if self.passed else "FAILS"
        return "PASS" if self.passed else "FAIL"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "params": dict(self.params),
            "relation": self.relation,
            "lhs": fmt_exact(self.lhs),
            "rhs": fmt_exact(self.rhs),
            "lhs_approx": fmt_real(self.lhs),
            "rhs_approx": fmt_real(self.rhs),
            "status": self.status,
            "asserted": self.asserted,
            "note": self.note,
        }


@dataclass
class Report:
    title: str
    guaranteed: bool = True
    fields: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    @property
    def ok(self) -> bool:
        return all(c.passed is not False for c in self.checks if c.asserted)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.asserted and c.passed is False]

    def counts(self) -> dict[str, int]:
        out = {"PASS": 0, "FAIL": 0, "SKIP": 0, "HOLDS": 0, "FAILS": 0}
        for c in self.checks:
            out[c.status] += 1
        return out

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "guaranteed": self.guaranteed,
            "ok": self.ok,
            "summary": self.counts(),
            "fields": {k: _plain(v) for k, v in self.fields.items()},
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["report", "guaranteed", "check", "anchor", "params",
                    "relation", "lhs", "rhs", "status", "asserted"])
        for c in self.checks:
            params = ";".join(f"{k}={v}" for k, v in c.params.items())
            w.writerow([self.title, str(self.guaranteed).lower(), c.name, c.anchor,
                        params, c.relation, fmt_exact(c.lhs), fmt_exact(c.rhs),
                        c.status, str(c.asserted).lower()])
        return buf.getvalue()

    def to_human(self) -> str:
        lines = [f"== {self.title} (guaranteed={str(self.guaranteed).lower()})"]
        for k, v in self.fields.items():
            lines.append(f"  {k}: {_human(v)}")
        for c in self.checks:
            params = " ".join(f"{k}={v}" for k, v in c.params.items())
            flag = "" if c.asserted else " [info]"
            lines.append(
                f"  {c.status} {c.name} {params}: {fmt_real(c.lhs)} {c.relation} "
                f"{fmt_real(c.rhs)}{flag}"
            )
        cnt = self.counts()
        line = f"  -> {cnt['PASS']} pass, {cnt['FAIL']} fail, {cnt['SKIP']} skipped"
        if cnt["HOLDS"] or cnt["FAILS"]:
            line += f"; unasserted: {cnt['HOLDS']} hold, {cnt['FAILS']} do not"
        lines.append(line)
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "human":
            return self.to_human()
        if fmt == "csv":
            return self.to_csv()
        if fmt == "structured":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")


def _plain(v):
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, float):
        return v
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    return fmt_exact(v)


def _human(v):
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_human(x) for x in v) + "]"
    if isinstance(v, (bool, str)) or v is None:
        return str(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_human(x)}" for k, x in v.items()) + "}"
    return fmt_real(v)


def merge(title: str, reports: list[Report]) -> Report:
    out = Report(title, guaranteed=all(r.guaranteed for r in reports))
    for r in reports:
        for k, v in r.fields.items():
            out.fields.setdefault(k, v)
        out.checks.extend(r.checks)
    return out
