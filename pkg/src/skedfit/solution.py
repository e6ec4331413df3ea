"""Solution and solver-statistics containers."""

from __future__ import annotations

import math

from dataclasses import dataclass, field
from typing import Dict, Optional


@dataclass
class SolveStats:
    nodes: int = 0
    wall_time: float = 0.0
    rel_gap_pct: float = float("inf")
    incumbent: float = float("-inf")
    best_bound: float = float("inf")
    status: str = "unknown"   # optimal | limit | infeasible | cancelled

    def to_dict(self) -> dict:
        def fin(x):
            return x if math.isfinite(x) else None

        return {"nodes": self.nodes, "wall_time": self.wall_time,
                "rel_gap_pct": fin(self.rel_gap_pct),
                "incumbent": fin(self.incumbent),
                "best_bound": fin(self.best_bound),
                "status": self.status}


@dataclass
class Solution:
    model_kind: str                    # ctc | ctcas
    variant: str
    objective: float
    values: Dict[str, float] = field(default_factory=dict)
    breakdown: Dict[str, float] = field(default_factory=dict)
    stats: Optional[SolveStats] = None

    def binaries(self, prefix: str) -> Dict[str, float]:
        return {k: v for k, v in self.values.items()
                if k.startswith(prefix + "[")}

    def to_dict(self) -> dict:
        # wall-clock statistics live on the run record, not here, so that
        # deterministic re-runs serialize byte-identically
        return {
            "model_kind": self.model_kind,
            "variant": self.variant,
            "objective": self.objective,
            "breakdown": dict(sorted(self.breakdown.items())),
            "values": dict(sorted(self.values.items())),
        }

    @staticmethod
    def from_dict(data: dict) -> "Solution":
        stats = None
        if data.get("stats"):
            raw = dict(data["stats"])
            for key, default in (("rel_gap_pct", float("inf")),
                                 ("incumbent", float("-inf")),
                                 ("best_bound", float("inf"))):
                if raw.get(key) is None:
                    raw[key] = default
            stats = SolveStats(**raw)
        return Solution(model_kind=data["model_kind"],
                        variant=data["variant"],
                        objective=data["objective"],
                        values=dict(data.get("values", {})),
                        breakdown=dict(data.get("breakdown", {})),
                        stats=stats)
