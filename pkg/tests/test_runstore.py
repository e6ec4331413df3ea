import json

import pytest

from skedfit import bnb, fixtures, verify
from skedfit.formulations import build_ctc
from skedfit.runstore import (RunRecord, RunStore, canonical_json,
                              instance_hash, run_id)


def test_instance_hash_stable(tiny):
    assert instance_hash(tiny) == instance_hash(tiny)
    assert instance_hash(tiny) != instance_hash(
        fixtures.tiny_instance(fare=999.0))


def test_roundtrip(tmp_path, tiny):
    store = RunStore(tmp_path)
    h = store.put_instance(tiny)
    assert h in store.instances()
    assert store.get_instance_dict(h)["hub"] == "HUB"

    sol, stats = bnb.solve(build_ctc(tiny), "micq2+mc")
    rid = run_id(h, "ctc", "micq2+mc", {"gap": 1e-4})
    store.put_run(RunRecord(id=rid, instance_hash=h, model_kind="ctc",
                            variant="micq2+mc", config={"gap": 1e-4},
                            solution=sol, stats=stats),
                  events=[{"event": "done"}])
    back = store.get_run(rid)
    assert back.solution.objective == sol.objective
    assert back.stats.nodes == stats.nodes
    assert store.run_events(rid) == [{"event": "done"}]
    assert store.get_run("nope") is None


def test_rerun_is_byte_identical(tmp_path, tiny):
    """Identical instance/config/seed re-runs produce identical records."""
    sol1, stats1 = bnb.solve(build_ctc(tiny), "micq2+mc",
                             bnb.SolveConfig(seed=7))
    sol2, stats2 = bnb.solve(build_ctc(tiny), "micq2+mc",
                             bnb.SolveConfig(seed=7))
    assert canonical_json(sol1.to_dict()) == canonical_json(sol2.to_dict())


def test_run_id_content_addressed(tiny):
    h = instance_hash(tiny)
    a = run_id(h, "ctc", "micq2+mc", {"gap": 1e-4})
    b = run_id(h, "ctc", "micq2+mc", {"gap": 1e-4})
    c = run_id(h, "ctc", "micq2+mc", {"gap": 1e-5})
    assert a == b != c
