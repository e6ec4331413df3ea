"""HTTP API: validated instance uploads, async solve jobs with streaming
event logs and cancellation, what-if sweeps, and the run history.

Every solution is audited against the original logical constraints before
it is persisted; infeasibility is part of the job result, not a transport
error.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import StreamingResponse
from pydantic import BaseModel, Field

from . import bnb, experiments, verify
from .formulations import CtcasBuildOptions, build_ctc, build_ctcas
from .instance import InstanceError, instance_from_dict
from .linearize import VARIANTS
from .runstore import RunRecord, RunStore, run_id

SCHEMA_VERSION = 1


class SolveRequest(BaseModel):
    instance_id: str
    model: str = Field("ctcas", pattern="^(ctc|ctcas)$")
    variant: str = "micq2+mc"
    max_swap: Optional[int] = None
    swap_cost_mode: str = Field("flat",
                                pattern="^(flat|aircraft_dependent)$")
    time_limit: float = 18000.0
    rel_gap: float = 1e-4
    seed: int = 0
    threads: int = 1


class WhatifRequest(BaseModel):
    instance_id: str
    k_max: int = 5
    variant: str = "micq2+mc"
    time_limit: float = 18000.0
    rel_gap: float = 1e-4


class _Job:
    def __init__(self, job_id: str, kind: str, dedupe_key: str):
        self.id = job_id
        self.kind = kind                 # solve | whatif
        self.dedupe_key = dedupe_key
        self.status = "queued"           # queued | running | done |
        #                                  failed | cancelled
        self.result: Optional[dict] = None
        self.error: Optional[str] = None
        self.events: List[dict] = []
        self.cancel_flag = threading.Event()
        self.created_at = time.time()
        self.lock = threading.Lock()

    def emit(self, ev: dict):
        with self.lock:
            self.events.append(ev)

    def snapshot(self) -> dict:
        with self.lock:
            return {
                "id": self.id, "kind": self.kind, "status": self.status,
                "error": self.error, "events": len(self.events),
                "created_at": self.created_at,
                "result": self.result,
            }


def create_app(store_dir="./skedfit-runs", workers: int = 2) -> FastAPI:
    app = FastAPI(title="skedfit", version="0.1.0")
    store = RunStore(store_dir)
    jobs: Dict[str, _Job] = {}
    jobs_lock = threading.Lock()
    pool = ThreadPoolExecutor(max_workers=max(1, workers))

    def _get_instance(h: str):
        data = store.get_instance_dict(h)
        if data is None:
            raise HTTPException(404, f"unknown instance {h}")
        try:
            return instance_from_dict(data)
        except InstanceError as exc:
            raise HTTPException(500, f"stored instance corrupt: {exc}")

    def _submit(kind: str, dedupe_key: str, work) -> dict:
        with jobs_lock:
            for job in jobs.values():
                if job.dedupe_key == dedupe_key and \
                        job.status in ("queued", "running"):
                    raise HTTPException(
                        409, f"job {job.id} already covers this request")
            job = _Job(uuid.uuid4().hex[:12], kind, dedupe_key)
            jobs[job.id] = job

        def runner():
            job.status = "running"
            try:
                job.result = work(job)
                job.status = ("cancelled" if job.cancel_flag.is_set()
                              else "done")
            except Exception as exc:  # surfaced to the client
                job.error = str(exc)
                job.status = "failed"

        pool.submit(runner)
        return {"job_id": job.id, "status": job.status}

    # -- instances ------------------------------------------------------------

    @app.post("/instances")
    def post_instance(body: dict):
        try:
            inst = instance_from_dict(body)
        except InstanceError as exc:
            raise HTTPException(400, f"validation failed: {exc}")
        h = store.put_instance(inst)
        return {"id": h, "summary": inst.summary(),
                "schema_version": SCHEMA_VERSION}

    @app.get("/instances")
    def list_instances():
        return {"instances": store.instances()}

    @app.get("/instances/{h}")
    def get_instance(h: str):
        data = store.get_instance_dict(h)
        if data is None:
            raise HTTPException(404, f"unknown instance {h}")
        return data

    # -- solves ---------------------------------------------------------------

    def _solve_work(req: SolveRequest, job: _Job) -> dict:
        inst = _get_instance(req.instance_id)
        if req.model == "ctc":
            model = build_ctc(inst)
        else:
            model = build_ctcas(inst, CtcasBuildOptions(
                max_swap=req.max_swap,
                swap_cost_mode=req.swap_cost_mode))
        config = bnb.SolveConfig(time_limit=req.time_limit,
                                 rel_gap=req.rel_gap, seed=req.seed,
                                 threads=req.threads)
        sol, stats = bnb.solve(model, req.variant, config,
                               event_sink=job.emit,
                               should_stop=job.cancel_flag.is_set)
        cfg = req.model_dump()
        rid = run_id(req.instance_id, req.model, req.variant, cfg)
        if sol is None:
            result = {"status": "infeasible" if stats.status == "infeasible"
                      else stats.status,
                      "stats": stats.to_dict(), "run_id": None}
            return result
        if req.model == "ctc":
            report = verify.verify_ctc_solution(inst, sol)
        else:
            report = verify.verify_ctcas_solution(
                inst, sol, max_swap=req.max_swap,
                swap_cost_mode=req.swap_cost_mode)
        if not report.ok:
            raise RuntimeError(f"solution failed the audit: "
                               f"{report.summary()}")
        sol.breakdown = report.breakdown
        record = RunRecord(id=rid, instance_hash=req.instance_id,
                           model_kind=req.model, variant=req.variant,
                           config=cfg, solution=sol, stats=stats)
        store.put_run(record, events=job.events)
        return {"status": stats.status, "stats": stats.to_dict(),
                "run_id": rid, "objective": sol.objective,
                "breakdown": report.breakdown,
                "spilled": report.spilled}

    @app.post("/solves")
    def post_solve(req: SolveRequest):
        if req.variant not in VARIANTS:
            raise HTTPException(400, f"unknown variant {req.variant}")
        if req.model == "ctc" and req.max_swap is not None:
            raise HTTPException(400, "max_swap applies to ctcas only")
        _get_instance(req.instance_id)  # 404 early
        key = json.dumps(req.model_dump(), sort_keys=True)
        return _submit("solve", key, lambda job: _solve_work(req, job))

    @app.get("/solves/{job_id}")
    def get_solve(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job {job_id}")
        return job.snapshot()

    @app.get("/solves/{job_id}/events")
    def get_events(job_id: str, follow: bool = False):
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job {job_id}")

        def stream():
            sent = 0
            while True:
                with job.lock:
                    chunk = job.events[sent:]
                    status = job.status
                for ev in chunk:
                    yield json.dumps(ev, sort_keys=True) + "\n"
                sent += len(chunk)
                if not follow or status in ("done", "failed", "cancelled"):
                    break
                time.sleep(0.05)

        return StreamingResponse(stream(), media_type="application/x-ndjson")

    @app.get("/solves/{job_id}/solution")
    def get_solution(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job {job_id}")
        if job.status != "done" or not job.result:
            return {"status": job.status, "solution": None}
        rid = job.result.get("run_id")
        record = store.get_run(rid) if rid else None
        return {"status": job.status,
                "solution": record.solution.to_dict()
                if record and record.solution else None,
                "run_id": rid}

    @app.post("/solves/{job_id}/cancel")
    def cancel(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job {job_id}")
        job.cancel_flag.set()
        return {"id": job_id, "status": job.status, "cancelling": True}

    # -- what-if ---------------------------------------------------------------

    def _whatif_work(req: WhatifRequest, job: _Job) -> dict:
        inst = _get_instance(req.instance_id)
        config = bnb.SolveConfig(time_limit=req.time_limit,
                                 rel_gap=req.rel_gap)
        points = []
        for k in range(req.k_max + 1):
            if job.cancel_flag.is_set():
                break
            out, sol = experiments.solve_instance(
                inst, "ctcas", req.variant, config, max_swap=k,
                label=f"whatif k={k}")
            total_pax = sum(f.demand for f in inst.flights.values())
            spill = sum(out.spilled.values())
            point = experiments.FrontierPoint(
                max_swap=k, profit=out.objective,
                spill_pct=100.0 * spill / total_pax,
                swaps_used=out.swaps_used, status=out.status,
                nodes=out.nodes, wall_time=out.wall_time)
            points.append(point)
            job.emit({"event": "frontier_point", **point.to_dict()})
            cfg = {"max_swap": k, "rel_gap": req.rel_gap,
                   "time_limit": req.time_limit}
            rid = run_id(req.instance_id, "ctcas", req.variant, cfg)
            if sol is not None:
                sol.breakdown = dict(sol.breakdown or {})
                record = RunRecord(id=rid, instance_hash=req.instance_id,
                                   model_kind="ctcas", variant=req.variant,
                                   config=cfg, solution=sol, stats=None)
                store.put_run(record)
                job.emit({"event": "frontier_run", "max_swap": k,
                          "run_id": rid})
        return {"points": [p.to_dict() for p in points],
                "plateau": experiments.frontier_plateau(points)
                if points else None}

    @app.post("/whatif")
    def post_whatif(req: WhatifRequest):
        _get_instance(req.instance_id)
        key = json.dumps(req.model_dump(), sort_keys=True)
        return _submit("whatif", key, lambda job: _whatif_work(req, job))

    # -- runs ----------------------------------------------------------------

    @app.get("/runs")
    def list_runs():
        return {"runs": [
            {"id": r.id, "instance_hash": r.instance_hash,
             "model_kind": r.model_kind, "variant": r.variant,
             "objective": r.solution.objective if r.solution else None,
             "created_at": r.created_at}
            for r in store.runs()]}

    @app.get("/runs/{rid}")
    def get_run(rid: str):
        record = store.get_run(rid)
        if record is None:
            raise HTTPException(404, f"unknown run {rid}")
        return record.to_dict()

    @app.get("/runs/{rid}/events")
    def get_run_events(rid: str):
        record = store.get_run(rid)
        if record is None:
            raise HTTPException(404, f"unknown run {rid}")
        return {"events": store.run_events(rid)}

    return app
