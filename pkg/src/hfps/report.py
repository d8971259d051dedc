"""Deterministic report documents, rendered as text or JSON.

Identical invocations must produce identical bytes, so everything is sorted
or kept in construction order, and all numbers are exact (rendered through
Fraction -> str).  The JSON layout is the stable surface documented in the
README; the text rendering shows the same fields.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

VERSION = "0.1.0"


def _num(value):
    """JSON-safe exact number: int when integral, else 'p/q' string."""
    from fractions import Fraction

    if isinstance(value, Fraction):
        if value.denominator == 1:
            return int(value)
        return str(value)
    return value


@dataclass
class ReportDocument:
    invocation: list
    cutoff: int | None = None
    models: list = field(default_factory=list)
    tables: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    exit_code: int = 0
    version: str = VERSION

    # -- builders -----------------------------------------------------------

    def add_model(self, label: str, cdga):
        self.models.append({
            "label": label,
            "generators": [
                {"name": n, "degree": d, "differential": s}
                for n, d, s in cdga.describe()
            ],
        })

    def add_table(self, label: str, kind: str, dims: dict, cutoff: int):
        self.tables.append({
            "label": label,
            "kind": kind,
            "dims": {str(k): v for k, v in sorted(dims.items()) if v},
            "cutoff": cutoff,
        })

    def add_verdict(self, label: str, value, detail: str = ""):
        self.verdicts.append({
            "label": label,
            "value": _num(value) if not isinstance(value, bool) else value,
            "detail": detail,
        })

    def add_note(self, note: str):
        if note not in self.notes:
            self.notes.append(note)

    # -- rendering ------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "tool": "hfps",
            "version": self.version,
            "invocation": list(self.invocation),
            "cutoff": self.cutoff,
            "models": self.models,
            "tables": self.tables,
            "verdicts": self.verdicts,
            "notes": list(self.notes),
            "exit_code": self.exit_code,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = [
            f"hfps {self.version}",
            f"invocation: {' '.join(self.invocation)}",
        ]
        if self.cutoff is not None:
            lines.append(f"cutoff: {self.cutoff} (all claims up to this degree)")
        for m in self.models:
            lines.append(f"model {m['label']}:")
            for g in m["generators"]:
                lines.append(
                    f"  {g['name']} (degree {g['degree']})  d -> {g['differential']}"
                )
        for t in self.tables:
            dims = ", ".join(f"{k}:{v}" for k, v in t["dims"].items())
            lines.append(
                f"{t['kind']} table [{t['label']}] up to degree {t['cutoff']}: "
                f"{{{dims}}}"
            )
        for v in self.verdicts:
            detail = f"  ({v['detail']})" if v["detail"] else ""
            lines.append(f"verdict {v['label']}: {v['value']}{detail}")
        for n in self.notes:
            lines.append(f"note: {n}")
        lines.append(f"exit: {self.exit_code}")
        return "\n".join(lines) + "\n"
