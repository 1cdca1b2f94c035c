"""Suite reports and their serializations.

A report is a flat record of what a verification suite did: which model,
which seed, and one line per check with the worst residual seen and the
tolerance it was held to.  Reports serialize to a human table or to
JSON.  Both forms are byte-stable: repeated runs with the same inputs
produce identical output, so the structured form can be diffed or
hashed by CI jobs.

The wall time is kept on the object for interactive use but is left out
of both serializations, since it is the one field that never reproduces.
"""

import json
from dataclasses import dataclass, field
from typing import List


@dataclass
class CheckRecord:
    """Outcome of a single named check.

    For witness-style checks (something must be visibly nonzero) the
    residual is the required magnitude divided by the observed one, so
    smaller is still better and the pass rule is uniform.
    """

    name: str
    law: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


@dataclass
class SuiteReport:
    suite: str
    model: str
    seed: int
    points: int
    records: List[CheckRecord] = field(default_factory=list)
    wall_time: float = 0.0

    def all_passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "model": self.model,
            "seed": self.seed,
            "points": self.points,
            "checks": [
                {
                    "name": r.name,
                    "law": r.law,
                    "max_residual": r.residual,
                    "tolerance": r.tolerance,
                    "pass": r.passed,
                }
                for r in self.records
            ],
            "all_pass": self.all_passed(),
        }

    def to_json_bytes(self) -> bytes:
        return json.dumps(self.to_dict(), sort_keys=True,
                          separators=(",", ":")).encode("ascii")

    def to_text(self) -> str:
        lines = ["suite: %s   model: %s   seed: %d   points: %d"
                 % (self.suite, self.model, self.seed, self.points)]
        width = max((len(r.name) for r in self.records), default=10)
        for r in self.records:
            status = "pass" if r.passed else "FAIL"
            lines.append("  [%s] %-*s  %.6e <= %.1e" % (
                status, width, r.name, r.residual, r.tolerance))
            lines.append("  %s law: %s" % (" " * 6, r.law))
        npass = sum(1 for r in self.records if r.passed)
        verdict = "PASS" if self.all_passed() else "FAIL"
        lines.append("result: %s (%d/%d checks)"
                     % (verdict, npass, len(self.records)))
        return "\n".join(lines) + "\n"


def emit_report(report: SuiteReport, fmt: str = "text") -> bytes:
    """Serialize a report; fmt is "text" or "json"."""
    if fmt == "json":
        return report.to_json_bytes()
    if fmt == "text":
        return report.to_text().encode("utf-8")
    raise ValueError("unknown report format %r (want text or json)" % fmt)
