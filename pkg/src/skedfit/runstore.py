"""Append-only, content-addressed store of solve runs.

Each run is one JSON file named by its id; ids hash the instance, model
kind, variant, and configuration, so identical deterministic re-runs land
on byte-identical records.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from .instance import Instance, instance_to_dict
from .solution import Solution, SolveStats

SCHEMA_VERSION = 1


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def instance_hash(inst: Instance) -> str:
    return hashlib.sha256(
        canonical_json(instance_to_dict(inst)).encode()).hexdigest()[:16]


@dataclass
class RunRecord:
    id: str
    instance_hash: str
    model_kind: str
    variant: str
    config: Dict
    solution: Optional[Solution]
    stats: Optional[SolveStats]
    created_at: float = field(default_factory=time.time)
    events_path: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "id": self.id,
            "instance_hash": self.instance_hash,
            "model_kind": self.model_kind,
            "variant": self.variant,
            "config": self.config,
            "solution": self.solution.to_dict() if self.solution else None,
            "stats": self.stats.to_dict() if self.stats else None,
            "created_at": self.created_at,
            "events_path": self.events_path,
        }

    @staticmethod
    def from_dict(data: dict) -> "RunRecord":
        sol = (Solution.from_dict(data["solution"])
               if data.get("solution") else None)
        stats = SolveStats(**data["stats"]) if data.get("stats") else None
        return RunRecord(id=data["id"],
                         instance_hash=data["instance_hash"],
                         model_kind=data["model_kind"],
                         variant=data["variant"],
                         config=data.get("config", {}),
                         solution=sol, stats=stats,
                         created_at=data.get("created_at", 0.0),
                         events_path=data.get("events_path"))


def run_id(inst_hash: str, model_kind: str, variant: str,
           config: Dict) -> str:
    payload = canonical_json({"instance": inst_hash, "kind": model_kind,
                              "variant": variant, "config": config})
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


class RunStore:
    """Directory of immutable run records plus stored instances."""

    def __init__(self, root):
        self.root = Path(root)
        (self.root / "runs").mkdir(parents=True, exist_ok=True)
        (self.root / "instances").mkdir(parents=True, exist_ok=True)
        (self.root / "events").mkdir(parents=True, exist_ok=True)

    # instances ------------------------------------------------------------

    def put_instance(self, inst: Instance) -> str:
        h = instance_hash(inst)
        path = self.root / "instances" / f"{h}.json"
        if not path.exists():
            tmp = path.with_suffix(".tmp")
            tmp.write_text(canonical_json(instance_to_dict(inst)) + "\n")
            os.replace(tmp, path)
        return h

    def get_instance_dict(self, h: str) -> Optional[dict]:
        path = self.root / "instances" / f"{h}.json"
        if not path.exists():
            return None
        return json.loads(path.read_text())

    def instances(self) -> List[str]:
        return sorted(p.stem for p in
                      (self.root / "instances").glob("*.json"))

    # runs -------------------------------------------------------------------

    def put_run(self, record: RunRecord, events: Optional[List[dict]] = None
                ) -> RunRecord:
        if events is not None:
            epath = self.root / "events" / f"{record.id}.jsonl"
            with open(epath, "w") as fh:
                for ev in events:
                    fh.write(canonical_json(ev) + "\n")
            record.events_path = str(epath)
        path = self.root / "runs" / f"{record.id}.json"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(canonical_json(record.to_dict()) + "\n")
        os.replace(tmp, path)
        return record

    def get_run(self, run_id_: str) -> Optional[RunRecord]:
        path = self.root / "runs" / f"{run_id_}.json"
        if not path.exists():
            return None
        return RunRecord.from_dict(json.loads(path.read_text()))

    def run_events(self, run_id_: str) -> List[dict]:
        path = self.root / "events" / f"{run_id_}.jsonl"
        if not path.exists():
            return []
        return [json.loads(line) for line in
                path.read_text().splitlines() if line.strip()]

    def runs(self) -> List[RunRecord]:
        out = []
        for p in sorted((self.root / "runs").glob("*.json")):
            out.append(RunRecord.from_dict(json.loads(p.read_text())))
        return out
