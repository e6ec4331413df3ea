"""Brute-force ground truth for desk-scale instances.

Enumerates every admissible combination of insertion slots, aircraft swaps
and the implied fleet assignments, then optimizes the continuous schedule
for each combination:

  1. a smooth convex solve (SQP) over departures, cruise times and
     tardiness under the combination's difference constraints,
  2. earliest-departure propagation at the returned cruise times
     (componentwise-minimal departures are penalty-optimal because each
     tardiness term is nondecreasing in its own departure), and
  3. cyclic coordinate descent of cruise times over a fixed grid, evaluated
     through the propagation, which is the value actually reported.

The reported value is exact up to the documented grid bound.  Everything
here is computed from the instance and the logical constraint semantics
directly; no solver module is imported.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from . import fuelburn
from .instance import EXISTING, Instance


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    grid_step: float = 0.25
    max_combinations: int = 10 ** 6

    def __post_init__(self):
        if self.grid_step <= 0:
            raise ValueError("grid step must be positive")


@dataclass(frozen=True)
class Combo:
    """One choice of binaries: hosts per pair plus active swaps."""

    after: Tuple[Tuple[str, str], ...]    # (outbound n, host i in E_I)
    before: Tuple[Tuple[str, str], ...]   # (inbound m, host j in E_O)
    swaps: Tuple[Tuple[str, str], ...]    # unordered (i, j), i < j


@dataclass
class OracleResult:
    objective: float
    combo: Combo
    values: Dict[str, float]
    breakdown: Dict[str, float]
    combos_total: int
    combos_feasible: int
    grid_bound: float


def _route_type(inst: Instance, rid: int) -> str:
    return inst.flights[inst.routes[rid].flights[0]].assigned_type


def type_assignment(inst: Instance, swaps) -> Dict[str, str]:
    """Post-swap aircraft type per existing flight (at most one swap per
    route, so each route splits into an original prefix and a taken-over
    suffix)."""
    types = {i: inst.flights[i].assigned_type for i in inst.existing}
    for (a, b) in swaps:
        for x, y in ((a, b), (b, a)):
            # x and every later flight on its route take the aircraft that
            # was bound for y (the partner route's original type).
            py = inst.predecessor[y]
            take = (inst.flights[py].assigned_type if py is not None
                    else inst.flights[y].assigned_type)
            route = inst.routes[inst.route_of[x]].flights
            for fid in route[route.index(x):]:
                types[fid] = take
    return types


def _swap_sets(inst: Instance, max_swap: Optional[int]):
    pairs = []
    for i in sorted(inst.existing):
        for j in inst.swap_candidates[i]:
            if i < j:
                pairs.append((i, j))
    sets: List[Tuple[Tuple[str, str], ...]] = [()]
    # grow subsets subject to one swap per route
    def extend(prefix, start, used_routes):
        for idx in range(start, len(pairs)):
            (a, b) = pairs[idx]
            ra, rb = inst.route_of[a], inst.route_of[b]
            if ra in used_routes or rb in used_routes:
                continue
            sub = prefix + (pairs[idx],)
            if max_swap is None or len(sub) <= max_swap:
                sets.append(sub)
                extend(sub, idx + 1, used_routes | {ra, rb})
    extend((), 0, frozenset())
    return sets


def _slots(inst: Instance, kind: str, swap_of: Dict[str, str], pair):
    """Admissible slots for one pair under a fixed swap set.

    A free "before j" slot exists only when the position j occupies in the
    new schedule has no predecessor: the sequence-preservation logic ties
    every other "before" to the matching "after" (for a swapped-in flight,
    the position is the swap partner's, so its predecessor rules).
    """
    slots = []
    for i in inst.existing_inbound:
        slots.append(("after", i))
    for j in inst.existing_outbound:
        position = swap_of.get(j, j)
        if inst.predecessor[position] is None:
            slots.append(("before", j))
    return slots


def enumerate_combos(inst: Instance, kind: str,
                     max_swap: Optional[int] = None):
    swap_sets = _swap_sets(inst, max_swap) if kind == "ctcas" else [()]
    combos = []
    for swaps in swap_sets:
        swap_of = {}
        for (a, b) in swaps:
            swap_of[a] = b
            swap_of[b] = a
        per_pair = []
        for p in inst.new_pairs:
            per_pair.append(_slots(inst, kind, swap_of, p))
        for choice in itertools.product(*per_pair):
            after, before, hosts_used = [], [], set()
            ok = True
            for p, (mode, host) in zip(inst.new_pairs, choice):
                if host in hosts_used:
                    ok = False
                    break
                hosts_used.add(host)
                if mode == "after":
                    after.append((p.outbound, host))
                    succ = inst.successor[host]
                    if succ is not None:
                        target = swap_of.get(succ, succ)
                        if target in hosts_used:
                            ok = False
                            break
                        hosts_used.add(target)
                        before.append((p.inbound, target))
                else:
                    before.append((p.inbound, host))
            if ok:
                combos.append(Combo(after=tuple(after), before=tuple(before),
                                    swaps=swaps))
    return combos


@dataclass
class _Timing:
    """Difference-constraint system of one combination."""

    flights: List[str]                       # flights with schedule vars
    edges: List[Tuple[str, str, float]]      # d_v >= d_u + f_u + eta_u + gap
    types: Dict[str, str]                    # assigned type per flight
    f_bounds: Dict[str, Tuple[float, float]]


def build_timing(inst: Instance, kind: str, combo: Combo,
                 connections: bool = True) -> Optional[_Timing]:
    types = type_assignment(inst, combo.swaps) if kind == "ctcas" else {
        i: inst.flights[i].assigned_type for i in inst.existing}
    swap_of = {}
    for (a, b) in combo.swaps:
        swap_of[a] = b
        swap_of[b] = a
    after_host = dict((n, i) for n, i in combo.after)
    before_host = dict((m, j) for m, j in combo.before)
    # pair types inherit from the adjacent flights
    for p in inst.new_pairs:
        t = None
        if p.outbound in after_host:
            t = types[after_host[p.outbound]]
        if p.inbound in before_host:
            t2 = types[before_host[p.inbound]]
            if t is not None and t2 != t:
                return None
            t = t2
        if t is None:
            return None
        for fid in (p.outbound, p.inbound):
            if t not in inst.flights[fid].cruise_bounds:
                return None
            types[fid] = t

    def tau(fid: str) -> float:
        return inst.turnaround(fid, types[fid])

    edges = []
    for (i, j) in inst.consecutive_pairs:
        if kind == "ctc":
            hosted = any(h == i for _, h in combo.after)
            if not hosted:
                edges.append((i, j, tau(i)))
        else:
            k = swap_of.get(j)
            if k is None:
                edges.append((i, j, tau(i)))
            else:
                edges.append((i, k, tau(i)))
    for n, i in combo.after:
        edges.append((i, n, tau(i)))
    for p in inst.new_pairs:
        edges.append((p.outbound, p.inbound, tau(p.outbound)))
    for m, j in combo.before:
        if kind == "ctc":
            t_host = inst.flights[j].assigned_type
            if t_host not in inst.flights[m].cruise_bounds:
                return None
            edges.append((m, j, inst.turnaround(m, t_host)))
        else:
            edges.append((m, j, tau(m)))
    if connections:
        for edge in inst.connections:
            edges.append((edge.from_flight, edge.to_flight,
                          edge.min_minutes))
    flights = sorted(inst.flights)
    f_bounds = {fid: inst.flights[fid].cruise_bounds[types[fid]]
                for fid in flights}
    return _Timing(flights=flights, edges=edges, types=types,
                   f_bounds=f_bounds)


def earliest_schedule(inst: Instance, timing: _Timing,
                      f: Dict[str, float], grace: Optional[float] = None):
    """Componentwise-minimal departures, or None when infeasible.

    Label propagation over the difference constraints; a non-converging
    propagation (only possible with cyclic constraints) raises.
    """
    g = inst.cost_config.grace if grace is None else grace
    d = {fid: inst.flights[fid].dep_window[0] for fid in timing.flights}
    n = len(timing.flights)
    for _ in range(n + 1):
        changed = False
        for (u, v, gap) in timing.edges:
            need = d[u] + f[u] + inst.flights[u].non_cruise + gap
            if need > d[v] + 1e-12:
                d[v] = need
                changed = True
        if not changed:
            break
    else:
        raise OracleError("timing constraints do not propagate to a fixed "
                          "point (cyclic structure)")
    for fid, dep in d.items():
        if dep > inst.flights[fid].dep_window[1] + 1e-9:
            return None
    a = {fid: d[fid] + f[fid] + inst.flights[fid].non_cruise
         for fid in timing.flights}
    b = {}
    for fid in inst.existing:
        b[fid] = max(0.0, a[fid] - (inst.flights[fid].orig_arrival + g))
    return d, a, b


def _objective(inst: Instance, kind: str, timing: _Timing, combo: Combo,
               f: Dict[str, float], b: Dict[str, float],
               swap_cost_mode: str = "flat",
               penalize_tardiness: bool = True) -> Tuple[float, Dict]:
    cfg = inst.cost_config
    unit = fuelburn.unit_fuel_cost(cfg)
    fuel_existing = sum(
        unit * fuelburn.fuel_burn(inst.fuel_coeffs(i, timing.types[i]), f[i])
        for i in inst.existing)
    baseline = sum(
        unit * fuelburn.fuel_burn(
            inst.fuel_coeffs(i, inst.flights[i].assigned_type),
            inst.flights[i].cruise_bounds[
                inst.flights[i].assigned_type][1])
        for i in inst.existing)
    fuel_new = sum(
        unit * fuelburn.fuel_burn(inst.fuel_coeffs(n, timing.types[n]), f[n])
        for n in inst.new)
    revenue = 0.0
    spill = 0.0
    for n in inst.new:
        fl = inst.flights[n]
        kappa = inst.aircraft_types[timing.types[n]].seats
        revenue += fl.fare * min(fl.demand, kappa)
        spill += inst.spill_cost(n) * max(0.0, fl.demand - kappa)
    if kind == "ctcas":
        for i in inst.existing:
            fl = inst.flights[i]
            kappa = inst.aircraft_types[timing.types[i]].seats
            spill += inst.spill_cost(i) * max(0.0, fl.demand - kappa)
    penalty = 0.0
    if penalize_tardiness:
        penalty = sum(cfg.rho * bv ** cfg.zeta for bv in b.values())
    swap_cost = 0.0
    for (i, j) in combo.swaps:
        swap_cost += cfg.psi
        if swap_cost_mode == "aircraft_dependent":
            swap_cost += cfg.swap_surcharge(
                inst.flights[i].assigned_type, inst.flights[j].assigned_type)
    increment = fuel_existing - baseline + fuel_new
    profit = (revenue - increment - spill - penalty - swap_cost
              - cfg.crew_service)
    return profit, {
        "revenue": revenue, "fuel_emission_increment": increment,
        "spilled_cost": spill, "deviation_penalty": penalty,
        "swap_cost": swap_cost, "crew_service_cost": cfg.crew_service,
        "profit": profit}


def _smooth_start(inst: Instance, kind: str, timing: _Timing,
                  grace: Optional[float], swap_cost_mode: str,
                  penalize: bool) -> Optional[Dict[str, float]]:
    """Convex warm start: SQP over (d, f, b) with linear constraints."""
    cfg = inst.cost_config
    g = cfg.grace if grace is None else grace
    flights = timing.flights
    nf = len(flights)
    idx = {fid: k for k, fid in enumerate(flights)}
    existing = [fid for fid in flights
                if inst.flights[fid].kind == EXISTING]
    bidx = {fid: 2 * nf + k for k, fid in enumerate(existing)}
    dim = 2 * nf + len(existing)
    unit = fuelburn.unit_fuel_cost(cfg)

    lo = np.zeros(dim)
    hi = np.zeros(dim)
    for fid in flights:
        lo[idx[fid]], hi[idx[fid]] = inst.flights[fid].dep_window
        lo[nf + idx[fid]], hi[nf + idx[fid]] = timing.f_bounds[fid]
    for fid in existing:
        lo[bidx[fid]], hi[bidx[fid]] = 0.0, np.inf

    rows = []
    rhs = []
    for (u, v, gap) in timing.edges:
        row = np.zeros(dim)
        row[idx[v]] = 1.0
        row[idx[u]] = -1.0
        row[nf + idx[u]] = -1.0
        rows.append(row)
        rhs.append(inst.flights[u].non_cruise + gap)
    for fid in existing:
        row = np.zeros(dim)
        row[bidx[fid]] = 1.0
        row[idx[fid]] = -1.0
        row[nf + idx[fid]] = -1.0
        rows.append(row)
        rhs.append(inst.flights[fid].non_cruise
                   - inst.flights[fid].orig_arrival - g)
    A = np.array(rows)
    r = np.array(rhs)

    coeffs = [inst.fuel_coeffs(fid, timing.types[fid]) for fid in flights]

    def fun(x):
        total = 0.0
        for k, fid in enumerate(flights):
            total += unit * fuelburn.fuel_burn(coeffs[k], max(x[nf + k],
                                                              1e-3))
        if penalize:
            for fid in existing:
                total += cfg.rho * max(x[bidx[fid]], 0.0) ** cfg.zeta
        return total

    def jac(x):
        gvec = np.zeros(dim)
        for k, fid in enumerate(flights):
            gvec[nf + k] = unit * fuelburn.fuel_burn_deriv(
                coeffs[k], max(x[nf + k], 1e-3))
        if penalize:
            for fid in existing:
                gvec[bidx[fid]] = cfg.rho * cfg.zeta * \
                    max(x[bidx[fid]], 0.0) ** (cfg.zeta - 1.0)
        return gvec

    f0 = {fid: timing.f_bounds[fid][0] for fid in flights}
    sched = earliest_schedule(inst, timing, f0, grace)
    if sched is None:
        return None
    d0, a0, b0 = sched
    x0 = np.zeros(dim)
    for fid in flights:
        x0[idx[fid]] = d0[fid]
        x0[nf + idx[fid]] = f0[fid]
    for fid in existing:
        x0[bidx[fid]] = b0[fid]

    cons = [{"type": "ineq", "fun": lambda x: A @ x - r,
             "jac": lambda x: A}]
    res = minimize(fun, x0, jac=jac, method="SLSQP",
                   bounds=list(zip(lo, hi)), constraints=cons,
                   options={"maxiter": 200, "ftol": 1e-10})
    if not res.success:
        return {fid: f0[fid] for fid in flights}
    return {fid: float(np.clip(res.x[nf + idx[fid]],
                               timing.f_bounds[fid][0],
                               timing.f_bounds[fid][1]))
            for fid in flights}


def _grid(lo: float, hi: float, step: float) -> List[float]:
    k = max(1, int(math.ceil((hi - lo) / step)))
    pts = [lo + (hi - lo) * i / k for i in range(k + 1)]
    return pts


def optimize_combo(inst: Instance, kind: str, combo: Combo,
                   config: OracleConfig, grace=None, connections=True,
                   swap_cost_mode: str = "flat", penalize=True):
    timing = build_timing(inst, kind, combo, connections)
    if timing is None:
        return None
    feas_probe = {fid: timing.f_bounds[fid][0] for fid in timing.flights}
    if earliest_schedule(inst, timing, feas_probe, grace) is None:
        return None

    f = _smooth_start(inst, kind, timing, grace, swap_cost_mode, penalize)
    if f is None:
        return None

    def evaluate(fmap):
        sched = earliest_schedule(inst, timing, fmap, grace)
        if sched is None:
            return None, None
        _, _, b = sched
        profit, detail = _objective(inst, kind, timing, combo, fmap, b,
                                    swap_cost_mode, penalize)
        return profit, detail

    best_profit, _ = evaluate(f)
    if best_profit is None:
        f = dict(feas_probe)
        best_profit, _ = evaluate(f)
    grids = {fid: sorted(set(_grid(*timing.f_bounds[fid],
                                   config.grid_step)))
             for fid in timing.flights}
    for _ in range(6):
        improved = False
        for fid in timing.flights:
            current = f[fid]
            best_val = current
            for cand in grids[fid]:
                if abs(cand - current) < 1e-12:
                    continue
                f[fid] = cand
                profit, _ = evaluate(f)
                if profit is not None and profit > best_profit + 1e-9:
                    best_profit = profit
                    best_val = cand
                    improved = True
            f[fid] = best_val
        if not improved:
            break
    profit, detail = evaluate(f)
    sched = earliest_schedule(inst, timing, f, grace)
    d, a, b = sched
    return profit, detail, timing, f, d, a, b


def solution_values(inst: Instance, kind: str, combo: Combo, timing,
                    f, d, a, b) -> Dict[str, float]:
    """Variable map in the formulation's naming, for the verifier."""
    from .formulations import vn_a, vn_b, vn_d, vn_f, vn_s, vn_y, vn_z
    values: Dict[str, float] = {}
    for fid in timing.flights:
        values[vn_d(fid)] = d[fid]
        values[vn_a(fid)] = a[fid]
        fl = inst.flights[fid]
        gated = kind == "ctcas" or fl.kind != EXISTING
        if gated:
            for t in inst.offered_types(fid):
                on = (t == timing.types[fid])
                values[vn_z(fid, t)] = 1.0 if on else 0.0
                values[vn_f(fid, t)] = f[fid] if on else 0.0
        else:
            values[vn_f(fid, fl.assigned_type)] = f[fid]
    for fid in inst.existing:
        values[vn_b(fid)] = b[fid]
    for n, i in combo.after:
        values[vn_y(i, n)] = 1.0
    for m, j in combo.before:
        values[vn_y(m, j)] = 1.0
    if kind == "ctcas":
        for (i, j) in combo.swaps:
            values[vn_s(i, j)] = 1.0
            values[vn_s(j, i)] = 1.0
    return values


def grid_error_bound(inst: Instance, config: OracleConfig) -> float:
    """Conservative per-solve bound on the value lost to the cruise grid."""
    cfg = inst.cost_config
    unit = fuelburn.unit_fuel_cost(cfg)
    total = 0.0
    horizon = 24 * 60.0
    for fid, fl in inst.flights.items():
        worst = 0.0
        for t in inst.offered_types(fid):
            co = inst.fuel_coeffs(fid, t)
            lo, hi = fl.cruise_bounds[t]
            slope = max(abs(fuelburn.fuel_burn_deriv(co, lo)),
                        abs(fuelburn.fuel_burn_deriv(co, hi)))
            worst = max(worst, unit * slope)
        # one grid step of cruise time may also shift arrivals one step
        pen_slope = cfg.rho * cfg.zeta * horizon ** (cfg.zeta - 1.0)
        total += (worst + pen_slope) * config.grid_step
    return total


def enumerate_optimum(inst: Instance, model_kind: str,
                      config: Optional[OracleConfig] = None,
                      max_swap: Optional[int] = None,
                      grace: Optional[float] = None,
                      connections: bool = True,
                      swap_cost_mode: str = "flat",
                      penalize_tardiness: bool = True) -> OracleResult:
    """Exhaustive optimum over binary combinations; the ground truth."""
    if model_kind not in ("ctc", "ctcas"):
        raise ValueError(f"model_kind must be ctc or ctcas, "
                         f"got {model_kind!r}")
    cfg = config or OracleConfig()
    combos = enumerate_combos(inst, model_kind, max_swap)
    if len(combos) > cfg.max_combinations:
        raise OracleError(f"{len(combos)} combinations exceed the guard "
                          f"{cfg.max_combinations}")
    best = None
    feasible = 0
    for combo in combos:
        out = optimize_combo(inst, model_kind, combo, cfg, grace,
                             connections, swap_cost_mode,
                             penalize_tardiness)
        if out is None:
            continue
        feasible += 1
        profit, detail, timing, f, d, a, b = out
        if best is None or profit > best[0]:
            best = (profit, detail, combo, timing, f, d, a, b)
    if best is None:
        raise OracleError("no feasible combination")
    profit, detail, combo, timing, f, d, a, b = best
    values = solution_values(inst, model_kind, combo, timing, f, d, a, b)
    return OracleResult(objective=profit, combo=combo, values=values,
                        breakdown=detail, combos_total=len(combos),
                        combos_feasible=feasible,
                        grid_bound=grid_error_bound(inst, cfg))
