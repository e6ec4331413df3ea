import numpy as np
import pytest

from skedfit import fixtures, oracle
from skedfit.instance import instance_from_dict, instance_to_dict
from skedfit.oracle import (Combo, OracleConfig, OracleError, build_timing,
                            earliest_schedule, enumerate_combos,
                            enumerate_optimum, type_assignment)


class TestEarliestSchedule:
    def test_two_flight_chain(self, tiny):
        combo = Combo(after=(("N1", "F1"),), before=(("N2", "F2"),),
                      swaps=())
        timing = build_timing(tiny, "ctc", combo)
        f = {fid: timing.f_bounds[fid][1] for fid in timing.flights}
        d, a, b = earliest_schedule(tiny, timing, f)
        tau = tiny.turnaround("F1", "A320_212")
        # each departure is the later of its window edge and the handoff
        assert d["N1"] == pytest.approx(
            max(a["F1"] + tau, tiny.flights["N1"].dep_window[0]))
        assert d["N2"] == pytest.approx(
            max(a["N1"] + tau, tiny.flights["N2"].dep_window[0]))
        assert d["F2"] == pytest.approx(
            max(a["N2"] + tau, tiny.flights["F2"].dep_window[0]))
        assert all(v == 0.0 for v in b.values())

    def test_window_upper_bound_binding(self, tiny):
        data = instance_to_dict(tiny)
        for fl in data["flights"]:
            if fl["id"] == "F2":
                # the chain needs F2 to wait until at least 800
                fl["dep_window"] = [780.0, 795.0]
        inst = instance_from_dict(data)
        combo = Combo(after=(("N1", "F1"),), before=(("N2", "F2"),),
                      swaps=())
        timing = build_timing(inst, "ctc", combo)
        f = {fid: timing.f_bounds[fid][1] for fid in timing.flights}
        assert earliest_schedule(inst, timing, f) is None

    def test_fixture_narrated_insertion_times(self, two_route):
        # wide-body slot: full left shift plus the narrated compressions
        combo = Combo(after=(("1842", "633"),), before=(("430", "451"),),
                      swaps=())
        timing = build_timing(two_route, "ctc", combo)
        f = {fid: timing.f_bounds[fid][1] for fid in timing.flights}
        f["633"] -= 17.0
        f["451"] -= 17.0
        f["584"] -= 3.0
        f["1842"] -= 8.0
        f["430"] -= 8.0
        d, a, b = earliest_schedule(two_route, timing, f)
        # hand propagation of the chain ORD legs
        assert d["633"] == pytest.approx(630.0)   # full 90-minute shift
        assert d["1842"] == pytest.approx(a["633"] + 40.0)
        assert b["451"] == pytest.approx(
            max(0.0, a["451"] - (1278.0 + 15.0)))

    def test_minimality_is_optimal_for_tardiness(self, two_route):
        rng = np.random.default_rng(7)
        combo = Combo(after=(("1842", "633"),), before=(("430", "451"),),
                      swaps=())
        timing = build_timing(two_route, "ctc", combo)
        f = {fid: timing.f_bounds[fid][0] for fid in timing.flights}
        d, a, b = earliest_schedule(two_route, timing, f)
        base = sum(v ** 1.5 for v in b.values())
        for _ in range(25):
            # any feasible delay of any departure never reduces tardiness
            shifted = dict(d)
            fid = list(d)[rng.integers(0, len(d))]
            shifted[fid] += rng.uniform(0.0, 30.0)
            arr = {k: shifted[k] + f[k] + two_route.flights[k].non_cruise
                   for k in shifted}
            bb = {k: max(0.0, arr[k] - (two_route.flights[k].orig_arrival
                                        + 15.0))
                  for k in two_route.existing}
            assert sum(v ** 1.5 for v in bb.values()) >= base - 1e-9


class TestEnumeration:
    def test_fixture_ctc_choice(self, two_route):
        res = enumerate_optimum(two_route, "ctc")
        assert dict(res.combo.after) == {"1842": "633"}
        assert dict(res.combo.before) == {"430": "451"}
        assert res.combo.swaps == ()
        assert res.breakdown["spilled_cost"] == 0.0

    def test_fixture_ctcas_choice(self, two_route):
        res = enumerate_optimum(two_route, "ctcas")
        assert res.combo.swaps == (("451", "623"),)
        assert dict(res.combo.after) == {"1842": "521"}
        # the pair inherits the fuel-efficient narrow-body
        assert res.values["z[1842|A320_212]"] == 1.0
        assert res.breakdown["spilled_cost"] == pytest.approx(
            19 * 105.63, rel=1e-9)

    def test_ctcas_dominates_ctc(self, two_route):
        ctc = enumerate_optimum(two_route, "ctc")
        ctcas = enumerate_optimum(two_route, "ctcas")
        assert ctcas.objective >= ctc.objective - 1e-9

    def test_tiny_single_slot(self, tiny):
        res = enumerate_optimum(tiny, "ctc")
        assert res.combos_total == 1
        assert res.combos_feasible == 1

    def test_max_swap_zero_matches_ctc_value(self, two_route):
        capped = enumerate_optimum(two_route, "ctcas", max_swap=0)
        assert capped.combo.swaps == ()

    def test_swap_type_reassignment(self, two_route):
        types = type_assignment(two_route, [("451", "623")])
        assert types["451"] == "A320_212"
        assert types["584"] == "A320_212"
        assert types["623"] == "B767_300"
        assert types["679"] == "B767_300"
        assert types["1586"] == "B767_300"
        assert types["527"] == "A320_212"

    def test_combination_guard(self, two_route):
        with pytest.raises(OracleError, match="guard"):
            enumerate_optimum(two_route, "ctcas",
                              OracleConfig(max_combinations=2))

    def test_grid_refinement_monotone(self, two_route):
        coarse = enumerate_optimum(two_route, "ctc",
                                   OracleConfig(grid_step=1.0))
        fine = enumerate_optimum(two_route, "ctc",
                                 OracleConfig(grid_step=0.5))
        assert fine.objective >= coarse.objective - coarse.grid_bound

    def test_free_before_slots_only_at_open_positions(self, two_route):
        combos = enumerate_combos(two_route, "ctc")
        befores = {c.before for c in combos if not c.after}
        # without swaps only route-first hub departures host a free return
        firsts = {two_route.routes[r].flights[0] for r in range(2)}
        for b in befores:
            for (_m, j) in b:
                assert j in firsts
