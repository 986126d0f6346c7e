"""Structured analysis results."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass
class Verdict:
    """Outcome of a check: pass/fail, a scalar margin, witness data and the
    tolerances that were applied.

    ``margin`` is signed so that positive means slack in the passing
    direction; ``None`` when the check has no natural scalar margin.
    """

    name: str
    passed: bool
    margin: float | None = None
    witness: dict[str, Any] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.passed)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "margin": to_jsonable(self.margin),
            "witness": to_jsonable(self.witness),
            "tolerances": to_jsonable(self.tolerances),
            "notes": list(self.notes),
        }


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy / complex values into JSON-friendly ones."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        c = complex(obj)
        return [c.real, c.imag]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return {"real": obj.real.tolist(), "imag": obj.imag.tolist()}
        return obj.tolist()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return str(obj)
