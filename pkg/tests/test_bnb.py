import math

import pytest

from skedfit import bnb, fixtures, oracle, verify
from skedfit.formulations import (CtcasBuildOptions, build_ctc, build_ctcas)
from skedfit.instance import instance_from_dict, instance_to_dict

FAST = bnb.SolveConfig(time_limit=600.0)


@pytest.fixture(scope="module")
def tiny_oracle():
    return oracle.enumerate_optimum(fixtures.tiny_instance(), "ctc")


@pytest.mark.parametrize("variant", ["micq1+bigm", "micq1+mc",
                                     "micq2+bigm", "micq2+mc"])
def test_tiny_all_variants_match_oracle(variant, tiny, tiny_oracle):
    sol, stats = bnb.solve(build_ctc(tiny), variant, FAST)
    assert stats.status == "optimal"
    tol = max(1e-3 * abs(tiny_oracle.objective), tiny_oracle.grid_bound)
    assert abs(sol.objective - tiny_oracle.objective) <= tol
    assert verify.verify_ctc_solution(tiny, sol).ok


def test_fixture_ctcas_strictly_better(two_route):
    ctc, _ = bnb.solve(build_ctc(two_route), "micq2+mc", FAST)
    ctcas, _ = bnb.solve(build_ctcas(two_route), "micq2+mc", FAST)
    assert ctcas.objective > ctc.objective + 1000.0


def test_fixture_ctcas_selects_swap(two_route):
    sol, stats = bnb.solve(build_ctcas(two_route), "micq2+mc", FAST)
    assert sol.values["s[451|623]"] == 1.0
    assert sol.values["s[623|451]"] == 1.0
    assert sol.values["z[1842|A320_212]"] == 1.0
    rep = verify.verify_ctcas_solution(two_route, sol)
    assert rep.ok
    assert rep.spilled == {"451": 10.0, "584": 6.0, "1842": 3.0}


def test_event_log_incumbents_monotone(two_route):
    events = []
    sol, stats = bnb.solve(build_ctcas(two_route), "micq2+mc", FAST,
                           event_sink=events.append)
    incumbents = [e["value"] for e in events if e["event"] == "incumbent"]
    assert incumbents == sorted(incumbents)
    assert any(e["event"] == "node_open" for e in events)
    assert events[-1]["event"] == "done"


def test_all_binaries_fixed_single_relaxation(tiny):
    model = build_ctc(tiny)
    # pin every binary to the oracle combo by shrinking bounds
    for v in model.binaries():
        v.lo = v.hi = 1.0 if v.id in ("y[F1|N1]", "y[N2|F2]",
                                      "z[N1|A320_212]",
                                      "z[N2|A320_212]") else 0.0
    sol, stats = bnb.solve(model, "micq2+mc", FAST)
    assert stats.nodes == 1
    assert stats.status == "optimal"


def test_root_bound_dominates_incumbent(two_route):
    model = build_ctcas(two_route)
    bound1 = bnb.root_relaxation_bound(model, "micq1+mc")
    bound2 = bnb.root_relaxation_bound(model, "micq2+mc")
    sol, _ = bnb.solve(model, "micq2+mc", FAST)
    assert bound2 <= bound1 + 1e-5 * max(1.0, abs(bound1))
    assert bound2 >= sol.objective - 1e-6 * abs(sol.objective)


def test_infeasible_instance_detected(tiny):
    data = instance_to_dict(tiny)
    for fl in data["flights"]:
        if fl["kind"] == "new":
            # insertion must fit between F1 and F2, which this forbids
            fl["dep_window"] = [fl["dep_window"][0],
                                fl["dep_window"][0] + 1.0]
        if fl["id"] == "F2":
            fl["dep_window"] = [810.0, 820.0]
        if fl["id"] == "F1":
            fl["dep_window"] = [480.0, 480.0]
    inst = instance_from_dict(data)
    from skedfit.formulations import CtcBuildOptions, FormulationError
    try:
        model = build_ctc(inst, CtcBuildOptions(prefilter=False))
    except FormulationError:
        return  # already impossible at build time
    sol, stats = bnb.solve(model, "micq2+mc", FAST)
    assert sol is None
    assert stats.status == "infeasible"


def test_time_limit_status(two_route):
    cfg = bnb.SolveConfig(time_limit=1e-3)
    sol, stats = bnb.solve(build_ctcas(two_route), "micq2+mc", cfg)
    assert stats.status == "limit"


def test_cancellation(two_route):
    calls = {"n": 0}

    def stop():
        calls["n"] += 1
        return calls["n"] > 2

    sol, stats = bnb.solve(build_ctcas(two_route), "micq2+mc", FAST,
                           should_stop=stop)
    assert stats.status == "cancelled"


def test_parallel_mode_same_objective(two_route):
    serial, _ = bnb.solve(build_ctcas(two_route), "micq2+mc", FAST)
    par, stats = bnb.solve(build_ctcas(two_route), "micq2+mc",
                           bnb.SolveConfig(threads=3))
    assert par.objective == pytest.approx(serial.objective, rel=1e-6)


def test_max_swap_zero_equals_ctc_when_no_spill(two_route):
    ctc, _ = bnb.solve(build_ctc(two_route), "micq2+mc", FAST)
    capped, _ = bnb.solve(
        build_ctcas(two_route, CtcasBuildOptions(max_swap=0)),
        "micq2+mc", FAST)
    assert capped.objective == pytest.approx(ctc.objective, rel=1e-5)


def test_deterministic_repeat(two_route):
    s1, st1 = bnb.solve(build_ctcas(two_route), "micq2+mc", FAST)
    s2, st2 = bnb.solve(build_ctcas(two_route), "micq2+mc", FAST)
    assert st1.nodes == st2.nodes
    assert s1.objective == s2.objective
    assert s1.values == s2.values
