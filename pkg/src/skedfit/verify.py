"""Independent feasibility audit and first-principles cost recomputation.

Solutions are checked against the ORIGINAL logical constraints (not the
linearized rows that produced them), and the objective is rebuilt from the
closed-form fuel and penalty functions.  Any mismatch is reported with the
violated constraint named, so corrupted or tampered solutions never pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import fuelburn
from .formulations import vn_a, vn_b, vn_d, vn_f, vn_s, vn_y, vn_z
from .instance import EXISTING, Instance

# scheduling slack below a third of a second is treated as exact; solver
# row residuals are norm-bounded, so single rows can sit ~1e-4 min off
TIME_TOL = 5e-3
BIN_TOL = 1e-5
OBJ_TOL = 1e-6


@dataclass
class Violation:
    constraint: str
    detail: str
    amount: float = 0.0


@dataclass
class VerifyReport:
    ok: bool
    violations: List[Violation] = field(default_factory=list)
    breakdown: Dict[str, float] = field(default_factory=dict)
    objective_recomputed: float = 0.0
    objective_reported: Optional[float] = None
    objective_rel_diff: Optional[float] = None
    spilled: Dict[str, float] = field(default_factory=dict)

    def summary(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(f"{v.constraint}: {v.detail}"
                         for v in self.violations[:8])


class _Audit:
    def __init__(self, inst: Instance, values: Dict[str, float], kind: str,
                 grace: float, connections: bool):
        self.inst = inst
        self.values = values
        self.kind = kind
        self.grace = grace
        self.connections = connections
        self.violations: List[Violation] = []

    def val(self, name: str) -> float:
        try:
            return self.values[name]
        except KeyError:
            raise ValueError(f"solution is missing a value for {name}")

    def opt(self, name: str) -> float:
        return self.values.get(name, 0.0)

    def flag(self, constraint: str, detail: str, amount: float = 0.0):
        self.violations.append(Violation(constraint, detail, amount))

    # -- assignments --------------------------------------------------------

    def active_types(self, fid: str) -> List[str]:
        fl = self.inst.flights[fid]
        if self.kind == "ctc" and fl.kind == EXISTING:
            return [fl.assigned_type]
        return self.inst.offered_types(fid)

    def assigned_type(self, fid: str) -> Optional[str]:
        fl = self.inst.flights[fid]
        if self.kind == "ctc" and fl.kind == EXISTING:
            return fl.assigned_type
        chosen = [t for t in self.active_types(fid)
                  if self.opt(vn_z(fid, t)) > 0.5]
        if len(chosen) != 1:
            self.flag(f"one_type[{fid}]",
                      f"flight must fly exactly one type, got {chosen}")
            return chosen[0] if chosen else None
        return chosen[0]

    def check_binary_domains(self):
        for name, v in self.values.items():
            if name.startswith(("y[", "s[")) or name.startswith("z["):
                if min(abs(v), abs(1.0 - v)) > BIN_TOL:
                    self.flag("integrality", f"{name} = {v} is fractional",
                              min(abs(v), abs(1 - v)))

    # -- insertion structure ------------------------------------------------

    def hosts(self) -> Tuple[Dict[str, str], Dict[str, str]]:
        """(after[n] = i with y[i|n] = 1, before[m] = j with y[m|j] = 1)."""
        inst = self.inst
        after, before = {}, {}
        for n in inst.new_outbound:
            chosen = [i for i in inst.existing_inbound
                      if self.opt(vn_y(i, n)) > 0.5]
            if len(chosen) > 1:
                self.flag(f"insert_in_degree[{n}]",
                          f"{n} follows {len(chosen)} flights")
            if chosen:
                after[n] = chosen[0]
        for m in inst.new_inbound:
            chosen = [j for j in inst.existing_outbound
                      if self.opt(vn_y(m, j)) > 0.5]
            if len(chosen) > 1:
                self.flag(f"insert_out_degree[{m}]",
                          f"{m} precedes {len(chosen)} flights")
            if chosen:
                before[m] = chosen[0]
        hosts_next: Dict[str, List[str]] = {}
        hosts_prev: Dict[str, List[str]] = {}
        for n, i in after.items():
            hosts_next.setdefault(i, []).append(n)
        for m, j in before.items():
            hosts_prev.setdefault(j, []).append(m)
        for i, ns in hosts_next.items():
            if len(ns) > 1:
                self.flag(f"host_next_cap[{i}]",
                          f"{i} hands over to {len(ns)} new flights")
        for j, ms in hosts_prev.items():
            if len(ms) > 1:
                self.flag(f"host_prev_cap[{j}]",
                          f"{j} receives from {len(ms)} new flights")
        for p in inst.new_pairs:
            if p.outbound not in after and p.inbound not in before:
                self.flag(f"pair_covered[{p.outbound}]",
                          "new pair is not attached to any route")
        return after, before

    def swaps(self) -> List[Tuple[str, str]]:
        inst = self.inst
        chosen = []
        for i in inst.existing:
            for j in inst.swap_candidates[i]:
                sij = self.opt(vn_s(i, j))
                sji = self.opt(vn_s(j, i))
                if abs(sij - sji) > BIN_TOL:
                    self.flag(f"swap_symmetry[{min(i, j)}|{max(i, j)}]",
                              f"s[{i}|{j}]={sij} but s[{j}|{i}]={sji}",
                              abs(sij - sji))
                if sij > 0.5 and i < j:
                    chosen.append((i, j))
        per_route: Dict[int, int] = {}
        for (i, j) in chosen:
            for fid in (i, j):
                r = inst.route_of[fid]
                per_route[r] = per_route.get(r, 0) + 1
        for r, count in per_route.items():
            if count > 1:
                self.flag(f"route_swap_cap[{inst.routes[r].tail}]",
                          f"{count} swaps on one route")
        return chosen

    # -- timing -------------------------------------------------------------

    def check_schedule(self, after, before, swap_of):
        inst = self.inst
        for fid, fl in inst.flights.items():
            d = self.val(vn_d(fid))
            a = self.val(vn_a(fid))
            if d < fl.dep_window[0] - TIME_TOL or \
                    d > fl.dep_window[1] + TIME_TOL:
                self.flag(f"dep_window[{fid}]",
                          f"departure {d} outside "
                          f"[{fl.dep_window[0]}, {fl.dep_window[1]}]")
            t = self.assigned_type(fid)
            total_f = sum(self.opt(vn_f(fid, tt))
                          for tt in self.active_types(fid))
            if abs(d + total_f + fl.non_cruise - a) > TIME_TOL:
                self.flag(f"arrival_def[{fid}]",
                          f"arrival {a} != departure + cruise + non-cruise "
                          f"{d + total_f + fl.non_cruise}",
                          abs(d + total_f + fl.non_cruise - a))
            for tt in self.active_types(fid):
                fv = self.opt(vn_f(fid, tt))
                cl, cu = fl.cruise_bounds[tt]
                on = (tt == t)
                lo = cl if on else 0.0
                hi = cu if on else 0.0
                if fv < lo - 1e-4 or fv > hi + 1e-4:
                    self.flag(f"cruise_bounds[{fid}|{tt}]",
                              f"cruise {fv} outside [{lo}, {hi}]")
        if self.connections:
            for edge in inst.connections:
                a = self.val(vn_a(edge.from_flight))
                d = self.val(vn_d(edge.to_flight))
                if a + edge.min_minutes > d + TIME_TOL:
                    self.flag(
                        f"connection[{edge.from_flight}|{edge.to_flight}]",
                        f"passengers need {edge.min_minutes} min, "
                        f"got {d - a}", a + edge.min_minutes - d)
        for p in inst.new_pairs:
            n, mm = p.outbound, p.inbound
            t = self.assigned_type(n)
            if t is None:
                continue
            ready = self.val(vn_a(n)) + inst.turnaround(n, t)
            if ready > self.val(vn_d(mm)) + TIME_TOL:
                self.flag(f"pair_turnaround[{n}]",
                          f"return leg departs before {ready}",
                          ready - self.val(vn_d(mm)))

        def ready_time(i: str) -> float:
            t = self.assigned_type(i)
            if t is None:
                return self.val(vn_a(i))
            return self.val(vn_a(i)) + inst.turnaround(i, t)

        for n, i in after.items():
            if ready_time(i) > self.val(vn_d(n)) + TIME_TOL:
                self.flag(f"handoff_to_new[{i}|{n}]",
                          f"new flight {n} departs before the aircraft of "
                          f"{i} is ready", ready_time(i) - self.val(vn_d(n)))
        for mm, j in before.items():
            t_host = (inst.flights[j].assigned_type if self.kind == "ctc"
                      else self.assigned_type(mm))
            tau = inst.turnaround(mm, t_host) if t_host else 0.0
            ready = self.val(vn_a(mm)) + tau
            if ready > self.val(vn_d(j)) + TIME_TOL:
                self.flag(f"handoff_from_new[{mm}|{j}]",
                          f"{j} departs before the returning aircraft is "
                          f"ready", ready - self.val(vn_d(j)))
        for (i, j) in inst.consecutive_pairs:
            swapped_j = swap_of.get(j)
            if self.kind == "ctc":
                gap_free = not any(n for n, host in after.items()
                                   if host == i)
                if gap_free and ready_time(i) > self.val(vn_d(j)) + TIME_TOL:
                    self.flag(f"chain[{i}|{j}]",
                              f"{j} departs before the aircraft of {i} is "
                              f"ready", ready_time(i) - self.val(vn_d(j)))
            else:
                if swapped_j is None:
                    if ready_time(i) > self.val(vn_d(j)) + TIME_TOL:
                        self.flag(f"chain[{i}|{j}]",
                                  f"{j} departs before the aircraft of {i} "
                                  f"is ready",
                                  ready_time(i) - self.val(vn_d(j)))
                else:
                    k = swapped_j
                    if ready_time(i) > self.val(vn_d(k)) + TIME_TOL:
                        self.flag(f"handoff_swap[{i}|{k}]",
                                  f"swap target {k} departs before the "
                                  f"aircraft of {i} is ready",
                                  ready_time(i) - self.val(vn_d(k)))
        for i in inst.existing:
            b = self.opt(vn_b(i))
            a = self.val(vn_a(i))
            need = a - (inst.flights[i].orig_arrival + self.grace)
            if b < -1e-7:
                self.flag(f"tardiness_def[{i}]", f"negative tardiness {b}")
            if b + TIME_TOL < need:
                self.flag(f"tardiness_def[{i}]",
                          f"tardiness {b} below arrival excess {need}",
                          need - b)

    # -- sequence / assignment coupling --------------------------------------

    def check_sequence(self, after, before, swap_of):
        inst = self.inst
        for (i, j) in inst.consecutive_pairs:
            for p in inst.new_pairs:
                yin = 1.0 if after.get(p.outbound) == i else 0.0
                swapped_j = swap_of.get(j)
                if swapped_j is None:
                    ymj = 1.0 if before.get(p.inbound) == j else 0.0
                    if abs(yin - ymj) > BIN_TOL:
                        self.flag(f"keep_sequence[{i}|{p.outbound}]",
                                  f"pair inserted after {i} must hand back "
                                  f"to {j}")
                else:
                    ymk = 1.0 if before.get(p.inbound) == swapped_j else 0.0
                    if abs(yin - ymk) > BIN_TOL:
                        self.flag(f"swap_sequence[{i}|{p.outbound}|"
                                  f"{swapped_j}]",
                                  f"pair inserted after {i} must hand back "
                                  f"to the swapped-in {swapped_j}")

    def check_assignment(self, after, before, swap_of):
        inst = self.inst
        for p in inst.new_pairs:
            tn = self.assigned_type(p.outbound)
            tm = self.assigned_type(p.inbound)
            if tn != tm:
                self.flag(f"pair_same_type[{p.outbound}]",
                          f"pair flies {tn} and {tm}")
            host = after.get(p.outbound)
            if host is not None and tn is not None:
                want = (inst.flights[host].assigned_type if self.kind == "ctc"
                        else self.assigned_type(host))
                if want != tn:
                    self.flag(f"type_match_in[{host}|{p.outbound}]",
                              f"pair must inherit type {want}, has {tn}")
            host = before.get(p.inbound)
            if host is not None and tm is not None:
                want = (inst.flights[host].assigned_type if self.kind == "ctc"
                        else self.assigned_type(host))
                if want != tm:
                    self.flag(f"type_match_out[{p.inbound}|{host}]",
                              f"pair must match type {want}, has {tm}")
        if self.kind != "ctcas":
            return
        for i in inst.existing:
            t_i = self.assigned_type(i)
            swapped = swap_of.get(i)
            pred = inst.predecessor[i]
            inherited = (self.assigned_type(pred) if pred is not None
                         else inst.flights[i].assigned_type)
            if swapped is None:
                if t_i != inherited:
                    self.flag(f"carry_type[{i}]",
                              f"no swap before {i}: type {t_i} must equal "
                              f"{inherited}")
            else:
                j = swapped
                pred_j = inst.predecessor[j]
                take = (self.assigned_type(pred_j) if pred_j is not None
                        else inst.flights[j].assigned_type)
                if t_i != take:
                    self.flag(f"takeover[{j}|{i}]",
                              f"swapped {i} must take type {take}, "
                              f"has {t_i}")

    # -- costs ---------------------------------------------------------------

    def breakdown(self, swaps, max_swap=None,
                  swap_cost_mode: str = "flat"):
        inst = self.inst
        cfg = inst.cost_config
        unit = fuelburn.unit_fuel_cost(cfg)
        revenue = 0.0
        spill_cost = 0.0
        spilled: Dict[str, float] = {}
        fuel_existing = 0.0
        baseline = 0.0
        fuel_new = 0.0
        penalty = 0.0
        for fid, fl in inst.flights.items():
            t = self.assigned_type(fid)
            if t is None:
                continue
            f = self.opt(vn_f(fid, t))
            if f <= 0:
                continue
            cost = unit * fuelburn.fuel_burn(inst.fuel_coeffs(fid, t), f)
            if fl.kind == EXISTING:
                fuel_existing += cost
            else:
                fuel_new += cost
        for i in inst.existing:
            fl = inst.flights[i]
            t0 = fl.assigned_type
            baseline += unit * fuelburn.fuel_burn(
                inst.fuel_coeffs(i, t0), fl.cruise_bounds[t0][1])
            penalty += cfg.rho * max(0.0, self.opt(vn_b(i))) ** cfg.zeta
            if self.kind == "ctcas":
                t = self.assigned_type(i)
                if t is not None:
                    sp = max(0.0, fl.demand - inst.aircraft_types[t].seats)
                    if sp > 0:
                        spilled[i] = sp
                        spill_cost += inst.spill_cost(i) * sp
        for n in inst.new:
            fl = inst.flights[n]
            t = self.assigned_type(n)
            if t is None:
                continue
            kappa = inst.aircraft_types[t].seats
            revenue += fl.fare * min(fl.demand, kappa)
            sp = max(0.0, fl.demand - kappa)
            if sp > 0:
                spilled[n] = sp
                spill_cost += inst.spill_cost(n) * sp
        swap_cost = 0.0
        for (i, j) in swaps:
            cost = cfg.psi
            if swap_cost_mode == "aircraft_dependent":
                cost += cfg.swap_surcharge(inst.flights[i].assigned_type,
                                           inst.flights[j].assigned_type)
            swap_cost += cost
        if max_swap is not None and len(swaps) > max_swap:
            self.flag("max_swap_cap",
                      f"{len(swaps)} swaps exceed the cap {max_swap}")
        increment = fuel_existing - baseline + fuel_new
        profit = (revenue - increment - spill_cost - penalty - swap_cost
                  - cfg.crew_service)
        return {
            "revenue": revenue,
            "fuel_emission_increment": increment,
            "spilled_cost": spill_cost,
            "deviation_penalty": penalty,
            "swap_cost": swap_cost,
            "crew_service_cost": cfg.crew_service,
            "profit": profit,
        }, spilled


def _verify(inst: Instance, solution, kind: str, grace=None,
            connections: bool = True, max_swap=None,
            swap_cost_mode: str = "flat") -> VerifyReport:
    values = solution.values if hasattr(solution, "values") else solution
    reported = getattr(solution, "objective", None)
    g = inst.cost_config.grace if grace is None else grace
    audit = _Audit(inst, values, kind, g, connections)
    audit.check_binary_domains()
    after, before = audit.hosts()
    swaps = audit.swaps() if kind == "ctcas" else []
    swap_of: Dict[str, str] = {}
    for (i, j) in swaps:
        swap_of[i] = j
        swap_of[j] = i
    audit.check_sequence(after, before, swap_of)
    audit.check_assignment(after, before, swap_of)
    audit.check_schedule(after, before, swap_of)
    breakdown, spilled = audit.breakdown(swaps, max_swap, swap_cost_mode)
    rel = None
    if reported is not None:
        rel = abs(breakdown["profit"] - reported) / max(
            1.0, abs(breakdown["profit"]), abs(reported))
        if rel > OBJ_TOL:
            audit.flag("objective", f"recomputed profit "
                       f"{breakdown['profit']} differs from reported "
                       f"{reported}", rel)
    return VerifyReport(ok=not audit.violations,
                        violations=audit.violations,
                        breakdown=breakdown,
                        objective_recomputed=breakdown["profit"],
                        objective_reported=reported,
                        objective_rel_diff=rel,
                        spilled=spilled)


def verify_ctc_solution(inst: Instance, solution, grace=None,
                        connections: bool = True) -> VerifyReport:
    """Audit a CTC solution against the original logical constraints."""
    return _verify(inst, solution, "ctc", grace, connections)


def verify_ctcas_solution(inst: Instance, solution, grace=None,
                          connections: bool = True, max_swap=None,
                          swap_cost_mode: str = "flat") -> VerifyReport:
    """Audit a CTC-AS solution, including swap symmetry and caps."""
    return _verify(inst, solution, "ctcas", grace, connections, max_swap,
                   swap_cost_mode)


def verify_solution(inst: Instance, solution, **kw) -> VerifyReport:
    kind = getattr(solution, "model_kind", None) or kw.pop("kind")
    if kind == "ctc":
        return verify_ctc_solution(inst, solution, **kw)
    return verify_ctcas_solution(inst, solution, **kw)
