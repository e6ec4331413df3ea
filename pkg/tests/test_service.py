import json
import time

import pytest
from fastapi.testclient import TestClient

from skedfit import fixtures
from skedfit.instance import instance_to_dict
from skedfit.service import create_app


@pytest.fixture()
def client(tmp_path):
    app = create_app(store_dir=tmp_path / "store", workers=2)
    with TestClient(app) as c:
        yield c


def upload_tiny(client):
    data = instance_to_dict(fixtures.tiny_instance())
    resp = client.post("/instances", json=data)
    assert resp.status_code == 200
    return resp.json()["id"]


def wait_job(client, job_id, timeout=120.0):
    t0 = time.time()
    while time.time() - t0 < timeout:
        snap = client.get(f"/solves/{job_id}").json()
        if snap["status"] in ("done", "failed", "cancelled"):
            return snap
        time.sleep(0.05)
    raise TimeoutError(job_id)


def test_upload_and_fetch(client):
    h = upload_tiny(client)
    back = client.get(f"/instances/{h}")
    assert back.status_code == 200
    assert back.json()["hub"] == "HUB"


def test_bad_instance_rejected(client):
    resp = client.post("/instances", json={"airports": []})
    assert resp.status_code == 400


def test_unknown_ids_404(client):
    assert client.get("/instances/none").status_code == 404
    assert client.get("/solves/none").status_code == 404
    assert client.get("/runs/none").status_code == 404


def test_solve_job_lifecycle(client):
    h = upload_tiny(client)
    resp = client.post("/solves", json={"instance_id": h, "model": "ctc"})
    assert resp.status_code == 200
    job_id = resp.json()["job_id"]
    snap = wait_job(client, job_id)
    assert snap["status"] == "done", snap
    assert snap["result"]["status"] == "optimal"
    rid = snap["result"]["run_id"]

    sol = client.get(f"/solves/{job_id}/solution").json()
    assert sol["solution"]["objective"] == pytest.approx(
        snap["result"]["objective"])

    record = client.get(f"/runs/{rid}").json()
    assert record["model_kind"] == "ctc"
    runs = client.get("/runs").json()["runs"]
    assert any(r["id"] == rid for r in runs)


def test_duplicate_active_job_409(client):
    h = upload_tiny(client)
    body = {"instance_id": h, "model": "ctcas", "time_limit": 60.0}
    first = client.post("/solves", json=body)
    assert first.status_code == 200
    second = client.post("/solves", json=body)
    # either still running (409) or already finished (accepted again)
    if second.status_code == 409:
        assert "already" in second.json()["detail"]
    wait_job(client, first.json()["job_id"])


def test_event_stream_ndjson(client):
    h = upload_tiny(client)
    job_id = client.post("/solves", json={"instance_id": h,
                                          "model": "ctc"}).json()["job_id"]
    wait_job(client, job_id)
    resp = client.get(f"/solves/{job_id}/events")
    lines = [json.loads(l) for l in resp.text.splitlines() if l.strip()]
    assert any(ev["event"] == "done" for ev in lines)


def test_whatif_returns_frontier(client):
    h = upload_tiny(client)
    resp = client.post("/whatif", json={"instance_id": h, "k_max": 1})
    assert resp.status_code == 200
    snap = wait_job(client, resp.json()["job_id"])
    assert snap["status"] == "done", snap
    points = snap["result"]["points"]
    assert len(points) == 2
    assert points[1]["profit"] >= points[0]["profit"] - 1e-6


def test_cancel_job(client):
    h = upload_tiny(client)
    job_id = client.post("/whatif", json={"instance_id": h,
                                          "k_max": 30}).json()["job_id"]
    client.post(f"/solves/{job_id}/cancel")
    snap = wait_job(client, job_id)
    assert snap["status"] in ("cancelled", "done")


def test_infeasible_flagged_in_result_not_transport(client):
    data = instance_to_dict(fixtures.tiny_instance())
    for fl in data["flights"]:
        if fl["kind"] == "new":
            fl["dep_window"] = [fl["dep_window"][0],
                                fl["dep_window"][0] + 1.0]
        if fl["id"] == "F2":
            fl["dep_window"] = [810.0, 820.0]
        if fl["id"] == "F1":
            fl["dep_window"] = [480.0, 480.0]
    resp = client.post("/instances", json=data)
    assert resp.status_code == 200
    h = resp.json()["id"]
    job = client.post("/solves", json={"instance_id": h, "model": "ctc"})
    assert job.status_code == 200
    snap = wait_job(client, job.json()["job_id"])
    assert snap["status"] in ("done", "failed")
    if snap["status"] == "done":
        assert snap["result"]["status"] == "infeasible"
