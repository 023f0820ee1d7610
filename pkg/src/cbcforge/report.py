"""Check reports: one schema for every command, as text or JSON.

A report collects obligation outcomes plus the per-unit statuses the
kernel computed. `overall` is "pass" only when nothing failed and nothing
is still open: an Invalid result or a Failed unit fails the report, an
Unknown result, an unfinished refinement, or an uninstantiated block
leaves it open.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .prover.result import Invalid, Obligation, ProofResult, Unknown, Valid, resultStr

PASS = "pass"
FAIL = "fail"
OPEN = "open"


@dataclass
class ReportItem:
    id: str
    provenance: str
    result: ProofResult

    @property
    def verdict(self) -> str:
        if isinstance(self.result, Valid):
            return "Valid"
        if isinstance(self.result, Invalid):
            return "Invalid"
        return "Unknown"


@dataclass
class Report:
    command: str
    bounds: dict
    items: list = field(default_factory=list)
    statuses: dict = field(default_factory=dict)  # section -> {name: status}
    listing: str = ""  # flatten: the composed bodies in canonical syntax

    def add(self, ob: Obligation | None, result: ProofResult, *,
            id: str = "", provenance: str = "") -> None:
        if ob is not None:
            id = id or ob.id
            provenance = provenance or ob.provenance
        self.items.append(ReportItem(id, provenance, result))

    @property
    def overall(self) -> str:
        failed = any(isinstance(it.result, Invalid) for it in self.items)
        open_ = any(isinstance(it.result, Unknown) for it in self.items)
        for section in self.statuses.values():
            for st in section.values():
                if st == "Failed":
                    failed = True
                elif st != "Proven":
                    open_ = True
        if failed:
            return FAIL
        return OPEN if open_ else PASS

    @property
    def exitCode(self) -> int:
        return 0 if self.overall == PASS else 1

    def toJson(self) -> dict:
        items = []
        for it in self.items:
            entry = {
                "id": it.id,
                "provenance": it.provenance,
                "result": it.verdict,
                "counterexample": None,
            }
            if isinstance(it.result, Invalid):
                entry["counterexample"] = {
                    k: list(v) if isinstance(v, tuple) else v
                    for k, v in it.result.counterexample.items()
                }
            elif isinstance(it.result, Unknown):
                entry["reason"] = it.result.reason
            items.append(entry)
        out = {
            "command": self.command,
            "bounds": dict(self.bounds),
            "items": items,
            "statuses": {k: dict(v) for k, v in self.statuses.items()},
            "overall": self.overall,
        }
        if self.listing:
            out["listing"] = self.listing
        return out

    def jsonText(self) -> str:
        return json.dumps(self.toJson(), indent=2, sort_keys=False) + "\n"

    def text(self) -> str:
        lines = []
        for it in self.items:
            lines.append("%-7s %s" % (resultStr(it.result).split("(")[0], it.id))
            if it.provenance:
                lines.append("        %s" % it.provenance)
            if isinstance(it.result, Invalid):
                lines.append("        counterexample: %s" % resultStr(it.result)[8:-1])
            elif isinstance(it.result, Unknown):
                lines.append("        reason: %s" % it.result.reason)
        for section, entries in self.statuses.items():
            if not entries:
                continue
            lines.append("%s:" % section)
            for name, st in entries.items():
                lines.append("  %-24s %s" % (name, st))
        if self.listing:
            lines.append(self.listing)
        lines.append("overall: %s" % self.overall)
        return "\n".join(lines) + "\n"
