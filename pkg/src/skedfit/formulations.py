"""Builders for the two insertion models.

build_ctc: insert new flight pairs by re-timing departures and compressing
cruise times; fleet assignment of new flights is inherited from the hosting
route.  build_ctcas: additionally re-assigns fleets of existing flights via
pairwise aircraft swaps at a common departure airport.

Both builders emit the turnaround logic as symbolic indicator constraints;
materializing them (big-M rows or McCormick systems) is the linearizer's
job, so both routes share one builder.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

from . import fuelburn
from .instance import EXISTING, Instance
from .modelir import (EQ, GE, INF, LE, IndicatorConstraint, Model)


class FormulationError(ValueError):
    """The instance cannot be turned into a well-posed model."""


@dataclass(frozen=True)
class CtcBuildOptions:
    connections: bool = True
    penalize_tardiness: bool = True
    grace: Optional[float] = None   # None: use the instance cost config
    prefilter: bool = True          # drop hopeless insertion arcs up front


@dataclass(frozen=True)
class CtcasBuildOptions(CtcBuildOptions):
    max_swap: Optional[int] = None
    swap_cost_mode: str = "flat"    # flat | aircraft_dependent


# -- variable names ----------------------------------------------------------

def vn_d(i): return f"d[{i}]"
def vn_f(i, t): return f"f[{i}|{t}]"
def vn_a(i): return f"a[{i}]"
def vn_b(i): return f"b[{i}]"
def vn_z(i, t): return f"z[{i}|{t}]"
def vn_y(i, j): return f"y[{i}|{j}]"
def vn_s(i, j): return f"s[{i}|{j}]"
def vn_g(i): return f"g[{i}]"


def vn_epi(kind, i, t):
    return f"{kind}[{i}|{t}]"


class _Builder:
    """Shared machinery for the two formulations."""

    def __init__(self, inst: Instance, opts: CtcBuildOptions, swap_aware: bool):
        self.inst = inst
        self.opts = opts
        self.swap = swap_aware
        self.model = Model("ctcas" if swap_aware else "ctc")
        self.grace = (opts.grace if opts.grace is not None
                      else inst.cost_config.grace)
        if self.grace < 0:
            raise FormulationError("grace must be nonnegative")
        if opts.penalize_tardiness and inst.cost_config.zeta != 1.5:
            # the tardiness epigraph chain encodes the 3/2 power exactly
            raise FormulationError(
                "conic tardiness penalty supports exponent 1.5 only; "
                "disable tardiness or set zeta = 1.5")
        self.model.meta["grace"] = self.grace
        self.unit_cost = fuelburn.unit_fuel_cost(inst.cost_config)
        # y arcs that survive the prefilter
        self.y_to_new: List[Tuple[str, str]] = []    # (i in E_I, n in N_O)
        self.y_from_new: List[Tuple[str, str]] = []  # (m in N_I, j in E_O)
        self.pair_of_new: Dict[str, Tuple[str, str]] = {}
        for p in inst.new_pairs:
            self.pair_of_new[p.outbound] = (p.outbound, p.inbound)
            self.pair_of_new[p.inbound] = (p.outbound, p.inbound)

    # -- candidate arcs ------------------------------------------------------

    def _active_types(self, i: str) -> List[str]:
        """Types the assignment variables range over for flight i."""
        if not self.swap and self.inst.flights[i].kind == EXISTING:
            return [self.inst.flights[i].assigned_type]
        return self.inst.offered_types(i)

    def _min_ready_after(self, i: str) -> float:
        """Earliest the aircraft of flight i can be ready for a successor."""
        f = self.inst.flights[i]
        lo = min(f.cruise_bounds[t][0] for t in self._active_types(i))
        tau = min(self.inst.turnaround(i, t) for t in self._active_types(i))
        return f.dep_window[0] + lo + f.non_cruise + tau

    def _arc_possible_to_new(self, i: str, n: str) -> bool:
        n_fl = self.inst.flights[n]
        m = self.pair_of_new[n][1]
        if not self.swap:
            t = self.inst.flights[i].assigned_type
            if (t not in n_fl.cruise_bounds
                    or t not in self.inst.flights[m].cruise_bounds):
                return False
        if not self.opts.prefilter:
            return True
        if self._min_ready_after(i) > n_fl.dep_window[1]:
            return False
        return True

    def _arc_possible_from_new(self, m: str, j: str) -> bool:
        m_fl = self.inst.flights[m]
        n = self.pair_of_new[m][0]
        if not self.swap:
            t = self.inst.flights[j].assigned_type
            if (t not in m_fl.cruise_bounds
                    or t not in self.inst.flights[n].cruise_bounds):
                return False
        if not self.opts.prefilter:
            return True
        # The return flight must still be able to hand over to j in time,
        # even after chaining through the outbound leg at full compression.
        n_fl = self.inst.flights[n]
        n_ready = (n_fl.dep_window[0]
                   + min(n_fl.cruise_bounds[t][0] for t in n_fl.cruise_bounds)
                   + n_fl.non_cruise
                   + min(self.inst.turnaround(n, t)
                         for t in n_fl.cruise_bounds))
        m_dep = max(m_fl.dep_window[0], n_ready)
        if m_dep > m_fl.dep_window[1]:
            return False
        m_ready = (m_dep
                   + min(m_fl.cruise_bounds[t][0] for t in m_fl.cruise_bounds)
                   + m_fl.non_cruise
                   + min(self.inst.turnaround(m, t)
                         for t in m_fl.cruise_bounds))
        return m_ready <= self.inst.flights[j].dep_window[1]

    def build_arcs(self):
        for n in self.inst.new_outbound:
            for i in self.inst.existing_inbound:
                if self._arc_possible_to_new(i, n):
                    self.y_to_new.append((i, n))
        for m in self.inst.new_inbound:
            for j in self.inst.existing_outbound:
                if self._arc_possible_from_new(m, j):
                    self.y_from_new.append((m, j))
        covered = {n: [] for n in self.inst.new_outbound}
        for i, n in self.y_to_new:
            covered[n].append((i, n))
        covered_m = {m: [] for m in self.inst.new_inbound}
        for m, j in self.y_from_new:
            covered_m[m].append((m, j))
        for p in self.inst.new_pairs:
            if not covered[p.outbound] and not covered_m[p.inbound]:
                raise FormulationError(
                    f"new pair ({p.outbound}, {p.inbound}) has no feasible "
                    f"insertion slot")

    # -- variables -----------------------------------------------------------

    def add_schedule_variables(self):
        inst, m = self.inst, self.model
        for fid, fl in sorted(inst.flights.items()):
            m.add_variable(vn_d(fid), fl.dep_window[0], fl.dep_window[1], "d")
            m.add_variable(vn_a(fid), 0.0, INF, "a")
            gated = self.swap or fl.kind != EXISTING
            for t in self._active_types(fid):
                cl, cu = fl.cruise_bounds[t]
                if gated:
                    m.add_variable(vn_f(fid, t), 0.0, cu, "f")
                else:
                    m.add_variable(vn_f(fid, t), cl, cu, "f")
        for fid in sorted(inst.existing):
            m.add_variable(vn_b(fid), 0.0, INF, "b")
            if self.opts.penalize_tardiness:
                m.add_variable(vn_g(fid), 0.0, INF, "g")
        z_flights = sorted(inst.flights) if self.swap else sorted(inst.new)
        for fid in z_flights:
            for t in self._active_types(fid):
                m.add_binary(vn_z(fid, t), "z")
        for i, n in sorted(self.y_to_new):
            m.add_binary(vn_y(i, n), "y")
        for mm, j in sorted(self.y_from_new):
            m.add_binary(vn_y(mm, j), "y")
        if self.swap:
            for i in sorted(inst.existing):
                for j in inst.swap_candidates[i]:
                    m.add_binary(vn_s(i, j), "s")

    def add_epigraph_variables(self):
        """Epigraph and penalty variables carrying the nonlinear cost terms.

        Each of (p, q, r, h) is denominated in kg of fuel (the burn-curve
        coefficient is absorbed into the variable), so all four carry the
        same objective price and the solver sees uniformly scaled columns.
        """
        inst, m = self.inst, self.model
        fuel_terms = []
        for fid in sorted(inst.flights):
            fl = inst.flights[fid]
            for t in self._active_types(fid):
                for kind in ("p", "q", "r", "h"):
                    m.add_variable(vn_epi(kind, fid, t), 0.0, INF, kind)
                    tag = ("new_flight_fuel" if fl.kind != EXISTING
                           else "fuel_increment")
                    m.add_objective_term(vn_epi(kind, fid, t),
                                         -self.unit_cost, tag)
                gated = self.swap or fl.kind != EXISTING
                fuel_terms.append({
                    "flight": fid, "type": t,
                    "f": vn_f(fid, t),
                    "z": vn_z(fid, t) if gated else None,
                    "p": vn_epi("p", fid, t), "q": vn_epi("q", fid, t),
                    "r": vn_epi("r", fid, t), "h": vn_epi("h", fid, t),
                    "coeffs": inst.fuel_coeffs(fid, t),
                    "bounds": fl.cruise_bounds[t],
                })
        m.meta["fuel_terms"] = fuel_terms
        if self.opts.penalize_tardiness:
            m.meta["penalty_terms"] = [
                {"flight": i, "b": vn_b(i), "g": vn_g(i)}
                for i in sorted(inst.existing)]
            for i in sorted(inst.existing):
                m.add_objective_term(vn_g(i), -inst.cost_config.rho,
                                     "tardiness")
        else:
            m.meta["penalty_terms"] = []

    # -- rows shared by both formulations -------------------------------------

    def add_insertion_rows(self):
        inst, m = self.inst, self.model
        by_n: Dict[str, List[str]] = {n: [] for n in inst.new_outbound}
        for i, n in self.y_to_new:
            by_n[n].append(vn_y(i, n))
        by_m: Dict[str, List[str]] = {mm: [] for mm in inst.new_inbound}
        for mm, j in self.y_from_new:
            by_m[mm].append(vn_y(mm, j))
        by_host_next: Dict[str, List[str]] = {}
        for i, n in self.y_to_new:
            by_host_next.setdefault(i, []).append(vn_y(i, n))
        by_host_prev: Dict[str, List[str]] = {}
        for mm, j in self.y_from_new:
            by_host_prev.setdefault(j, []).append(vn_y(mm, j))

        for n in sorted(inst.new_outbound):
            if by_n[n]:
                m.add_row(f"insert_in_degree[{n}]",
                          {v: 1.0 for v in by_n[n]}, LE, 1.0, "insertion")
        for mm in sorted(inst.new_inbound):
            if by_m[mm]:
                m.add_row(f"insert_out_degree[{mm}]",
                          {v: 1.0 for v in by_m[mm]}, LE, 1.0, "insertion")
        for p in inst.new_pairs:
            coeffs = {v: 1.0 for v in by_n[p.outbound]}
            coeffs.update({v: 1.0 for v in by_m[p.inbound]})
            m.add_row(f"pair_covered[{p.outbound}]", coeffs, GE, 1.0,
                      "insertion")
        for i in sorted(by_host_next):
            m.add_row(f"host_next_cap[{i}]",
                      {v: 1.0 for v in by_host_next[i]}, LE, 1.0, "insertion")
        for j in sorted(by_host_prev):
            m.add_row(f"host_prev_cap[{j}]",
                      {v: 1.0 for v in by_host_prev[j]}, LE, 1.0, "insertion")
        self._y_by_host_next = by_host_next

    def y_or_zero(self, i, j) -> Optional[str]:
        name = vn_y(i, j)
        return name if name in self.model.variables else None

    def add_timing_rows(self):
        inst, m = self.inst, self.model
        for fid in sorted(inst.flights):
            fl = inst.flights[fid]
            coeffs = {vn_a(fid): 1.0, vn_d(fid): -1.0}
            for t in self._active_types(fid):
                coeffs[vn_f(fid, t)] = -1.0
            m.add_row(f"arrival_def[{fid}]", coeffs, EQ, fl.non_cruise,
                      "timing")
        for p in inst.new_pairs:
            n, mm = p.outbound, p.inbound
            coeffs = {vn_a(n): 1.0, vn_d(mm): -1.0}
            for t in self._active_types(n):
                coeffs[vn_z(n, t)] = inst.turnaround(n, t)
            m.add_row(f"pair_turnaround[{n}]", coeffs, LE, 0.0, "timing")
        if self.opts.connections:
            for edge in inst.connections:
                m.add_row(
                    f"connection[{edge.from_flight}|{edge.to_flight}]",
                    {vn_a(edge.from_flight): 1.0,
                     vn_d(edge.to_flight): -1.0},
                    LE, -edge.min_minutes, "connection")
        for i in sorted(inst.existing):
            fl = inst.flights[i]
            m.add_row(f"tardiness_def[{i}]",
                      {vn_a(i): 1.0, vn_b(i): -1.0}, LE,
                      fl.orig_arrival + self.grace, "tardiness")

    def ready_expr(self, i: str) -> Tuple[Dict[str, float], float]:
        """Arrival plus turnaround of flight i, over its assignment vars."""
        if not self.swap and self.inst.flights[i].kind == EXISTING:
            t = self.inst.flights[i].assigned_type
            return {vn_a(i): 1.0}, self.inst.turnaround(i, t)
        terms = {vn_a(i): 1.0}
        for t in self._active_types(i):
            terms[vn_z(i, t)] = self.inst.turnaround(i, t)
        return terms, 0.0

    def add_handoff_indicators(self):
        """Turnaround precedence around inserted pairs, in indicator form."""
        m = self.model
        for i, n in sorted(self.y_to_new):
            terms, const = self.ready_expr(i)
            m.add_indicator(IndicatorConstraint(
                name=f"handoff_to_new[{i}|{n}]",
                trigger_vars=(vn_y(i, n),), trigger_value=1,
                target=vn_d(n), ready_terms=terms, ready_const=const,
                family="to_new", payload=(i, n), v_flight=i))
        for mm, j in sorted(self.y_from_new):
            terms, const = self.ready_expr(mm)
            ind = IndicatorConstraint(
                name=f"handoff_from_new[{mm}|{j}]",
                trigger_vars=(vn_y(mm, j),), trigger_value=1,
                target=vn_d(j), ready_terms=terms, ready_const=const,
                family="from_new", payload=(mm, j), v_flight=mm)
            if not self.swap:
                # Stored enforcement form pins the turnaround to the hosting
                # route's type (implied by the assignment-matching rows).
                t_host = self.inst.flights[j].assigned_type
                v_terms, v_const = dict(terms), const
                terms2 = {vn_a(mm): 1.0}
                const2 = self.inst.turnaround(mm, t_host)
                ind = replace(ind, ready_terms=terms2, ready_const=const2,
                              v_terms=v_terms, v_const=v_const)
            m.add_indicator(ind)

    def add_chain_indicators(self):
        """Original-route turnaround chains, relaxed while a pair or a swap
        occupies the gap."""
        inst, m = self.inst, self.model
        for i, j in inst.consecutive_pairs:
            terms, const = self.ready_expr(i)
            if self.swap:
                triggers = tuple(vn_s(j, k) for k in inst.swap_candidates[j])
            else:
                triggers = tuple(self._y_by_host_next.get(i, ()))
            if triggers:
                m.add_indicator(IndicatorConstraint(
                    name=f"chain[{i}|{j}]",
                    trigger_vars=triggers, trigger_value=0,
                    target=vn_d(j), ready_terms=terms, ready_const=const,
                    family="chain", payload=(i, j), v_flight=i))
            else:
                coeffs = {vn_d(j): 1.0}
                for v, c in terms.items():
                    coeffs[v] = coeffs.get(v, 0.0) - c
                m.add_row(f"chain_fixed[{i}|{j}]", coeffs, GE, const,
                          "timing")
            if self.swap:
                for k in inst.swap_candidates[j]:
                    m.add_indicator(IndicatorConstraint(
                        name=f"handoff_swap[{i}|{k}]",
                        trigger_vars=(vn_s(j, k),), trigger_value=1,
                        target=vn_d(k), ready_terms=terms, ready_const=const,
                        family="swap_chain", payload=(i, k, j), v_flight=i))

    def add_cruise_gate_rows(self):
        inst, m = self.inst, self.model
        for fid in sorted(inst.flights):
            fl = inst.flights[fid]
            if not self.swap and fl.kind == EXISTING:
                continue  # fixed type, plain bounds on f
            for t in self._active_types(fid):
                cl, cu = fl.cruise_bounds[t]
                m.add_row(f"cruise_gate_lo[{fid}|{t}]",
                          {vn_f(fid, t): 1.0, vn_z(fid, t): -cl}, GE, 0.0,
                          "cruise")
                m.add_row(f"cruise_gate_hi[{fid}|{t}]",
                          {vn_f(fid, t): 1.0, vn_z(fid, t): -cu}, LE, 0.0,
                          "cruise")

    def add_revenue_and_spill_terms(self):
        inst, m = self.inst, self.model
        for n in sorted(inst.new):
            fl = inst.flights[n]
            sigma = inst.spill_cost(n)
            for t in self._active_types(n):
                kappa = inst.aircraft_types[t].seats
                m.add_objective_term(vn_z(n, t),
                                     fl.fare * min(fl.demand, kappa),
                                     "revenue")
                spill = max(0.0, fl.demand - kappa)
                if spill:
                    m.add_objective_term(vn_z(n, t), -sigma * spill, "spill")
        if self.swap:
            for i in sorted(inst.existing):
                fl = inst.flights[i]
                sigma = inst.spill_cost(i)
                for t in self._active_types(i):
                    kappa = inst.aircraft_types[t].seats
                    spill = max(0.0, fl.demand - kappa)
                    if spill:
                        m.add_objective_term(vn_z(i, t), -sigma * spill,
                                             "spill")

    def add_baseline_and_crew(self):
        inst, m = self.inst, self.model
        refund = 0.0
        for i in inst.existing:
            fl = inst.flights[i]
            t = fl.assigned_type
            coeffs = inst.fuel_coeffs(i, t)
            refund += self.unit_cost * fuelburn.fuel_burn(
                coeffs, fl.cruise_bounds[t][1])
        m.add_objective_constant(refund, "fuel_increment")
        m.add_objective_constant(-inst.cost_config.crew_service,
                                 "crew_service")


def build_ctc(inst: Instance, opts: Optional[CtcBuildOptions] = None) -> Model:
    """Insertion model without aircraft swapping."""
    opts = opts or CtcBuildOptions()
    b = _Builder(inst, opts, swap_aware=False)
    b.build_arcs()
    b.add_schedule_variables()
    b.add_epigraph_variables()
    b.add_insertion_rows()
    m, inst_ = b.model, inst

    # Sequence preservation: a pair inserted after i sits before succ(i).
    for (i, j) in inst_.consecutive_pairs:
        for p in inst_.new_pairs:
            yin = b.y_or_zero(i, p.outbound)
            ymj = b.y_or_zero(p.inbound, j)
            if yin and ymj:
                m.add_row(f"keep_sequence[{i}|{p.outbound}]",
                          {yin: 1.0, ymj: -1.0}, EQ, 0.0, "sequence")
            elif yin and not ymj:
                m.add_row(f"keep_sequence[{i}|{p.outbound}]",
                          {yin: 1.0}, EQ, 0.0, "sequence")
            elif ymj and not yin:
                m.add_row(f"keep_sequence[{i}|{p.outbound}]",
                          {ymj: 1.0}, EQ, 0.0, "sequence")

    # Assignment of new flights inherits the hosting route's type.
    for i, n in b.y_to_new:
        chi_t = inst_.flights[i].assigned_type
        for t in b._active_types(n):
            chi = 1.0 if t == chi_t else 0.0
            m.add_abs_le(f"type_match_in[{i}|{n}|{t}]",
                         {vn_z(n, t): 1.0}, -chi,
                         {vn_y(i, n): -1.0}, 1.0, "assignment")
    for mm, j in b.y_from_new:
        chi_t = inst_.flights[j].assigned_type
        for t in b._active_types(mm):
            chi = 1.0 if t == chi_t else 0.0
            m.add_abs_le(f"type_match_out[{mm}|{j}|{t}]",
                         {vn_z(mm, t): 1.0}, -chi,
                         {vn_y(mm, j): -1.0}, 1.0, "assignment")
    for p in inst_.new_pairs:
        types_n = set(b._active_types(p.outbound))
        types_m = set(b._active_types(p.inbound))
        for t in sorted(types_n | types_m):
            zn = vn_z(p.outbound, t) if t in types_n else None
            zm = vn_z(p.inbound, t) if t in types_m else None
            if zn and zm:
                m.add_row(f"pair_same_type[{p.outbound}|{t}]",
                          {zn: 1.0, zm: -1.0}, EQ, 0.0, "assignment")
            elif zn:
                m.add_row(f"pair_same_type[{p.outbound}|{t}]", {zn: 1.0},
                          EQ, 0.0, "assignment")
            else:
                m.add_row(f"pair_same_type[{p.outbound}|{t}]", {zm: 1.0},
                          EQ, 0.0, "assignment")
        m.add_row(f"one_type[{p.outbound}]",
                  {vn_z(p.outbound, t): 1.0 for t in types_n}, EQ, 1.0,
                  "assignment")

    b.add_timing_rows()
    b.add_handoff_indicators()
    b.add_chain_indicators()
    b.add_cruise_gate_rows()
    b.add_revenue_and_spill_terms()
    b.add_baseline_and_crew()

    m.meta["kind"] = "ctc"
    m.meta["instance"] = inst
    m.meta["options"] = opts
    m.audit()
    return m


def build_ctcas(inst: Instance,
                opts: Optional[CtcasBuildOptions] = None) -> Model:
    """Insertion model with aircraft swapping and per-flight re-fleeting."""
    opts = opts or CtcasBuildOptions()
    if opts.max_swap is not None and opts.max_swap < 0:
        raise FormulationError("max_swap must be nonnegative")
    b = _Builder(inst, opts, swap_aware=True)
    b.build_arcs()
    b.add_schedule_variables()
    b.add_epigraph_variables()
    b.add_insertion_rows()
    m, inst_ = b.model, inst

    # Assignment of new flights matches the adjacent existing flight.
    for i, n in b.y_to_new:
        for t in sorted(set(b._active_types(n)) | set(b._active_types(i))):
            zn = vn_z(n, t) if t in b._active_types(n) else None
            zi = vn_z(i, t) if t in b._active_types(i) else None
            x_terms = {}
            if zn:
                x_terms[zn] = 1.0
            if zi:
                x_terms[zi] = x_terms.get(zi, 0.0) - 1.0
            if not x_terms:
                continue
            m.add_abs_le(f"type_match_in[{i}|{n}|{t}]", x_terms, 0.0,
                         {vn_y(i, n): -1.0}, 1.0, "assignment")
    for mm, j in b.y_from_new:
        for t in sorted(set(b._active_types(mm)) | set(b._active_types(j))):
            zm = vn_z(mm, t) if t in b._active_types(mm) else None
            zj = vn_z(j, t) if t in b._active_types(j) else None
            x_terms = {}
            if zm:
                x_terms[zm] = 1.0
            if zj:
                x_terms[zj] = x_terms.get(zj, 0.0) - 1.0
            if not x_terms:
                continue
            m.add_abs_le(f"type_match_out[{mm}|{j}|{t}]", x_terms, 0.0,
                         {vn_y(mm, j): -1.0}, 1.0, "assignment")
    for p in inst_.new_pairs:
        types_n = set(b._active_types(p.outbound))
        types_m = set(b._active_types(p.inbound))
        for t in sorted(types_n | types_m):
            zn = vn_z(p.outbound, t) if t in types_n else None
            zm = vn_z(p.inbound, t) if t in types_m else None
            coeffs = {}
            if zn:
                coeffs[zn] = 1.0
            if zm:
                coeffs[zm] = coeffs.get(zm, 0.0) - 1.0
            m.add_row(f"pair_same_type[{p.outbound}|{t}]", coeffs, EQ, 0.0,
                      "assignment")
        m.add_row(f"one_type[{p.outbound}]",
                  {vn_z(p.outbound, t): 1.0 for t in types_n}, EQ, 1.0,
                  "assignment")

    # Each existing flight flies exactly one type (implied by the original
    # premise that tails are given; keeps relaxations tight).
    for i in sorted(inst_.existing):
        m.add_row(f"one_type[{i}]",
                  {vn_z(i, t): 1.0 for t in b._active_types(i)}, EQ, 1.0,
                  "assignment")

    # Swap/assignment linkage along each route.  A route's first flight has
    # no predecessor: the parked original tail plays that role, so its
    # original assignment substitutes for the predecessor's variables.
    for i in sorted(inst_.existing):
        cands = inst_.swap_candidates[i]
        bound = {vn_s(i, k): 1.0 for k in cands}
        pred = inst_.predecessor[i]
        for t in b._active_types(i):
            if pred is not None:
                zp = (vn_z(pred, t)
                      if t in b._active_types(pred) else None)
                x_terms = {vn_z(i, t): 1.0}
                if zp:
                    x_terms[zp] = -1.0
                x_const = 0.0
            else:
                chi = 1.0 if t == inst_.flights[i].assigned_type else 0.0
                x_terms = {vn_z(i, t): 1.0}
                x_const = -chi
            if bound:
                m.add_abs_le(f"carry_type[{i}|{t}]", x_terms, x_const,
                             dict(bound), 0.0, "swap")
            else:
                coeffs = dict(x_terms)
                m.add_row(f"carry_type[{i}|{t}]", coeffs, EQ, -x_const,
                          "swap")
        for j in cands:
            t_take = (inst_.flights[pred].assigned_type if pred is not None
                      else inst_.flights[i].assigned_type)
            zj = vn_z(j, t_take) if t_take in b._active_types(j) else None
            if zj:
                m.add_row(f"takeover[{i}|{j}]",
                          {zj: 1.0, vn_s(i, j): -1.0}, GE, 0.0, "swap")
            else:
                m.add_row(f"takeover[{i}|{j}]", {vn_s(i, j): 1.0}, LE, 0.0,
                          "swap")

    for r_idx, route in enumerate(inst_.routes):
        coeffs = {}
        for i in route.flights:
            for j in inst_.swap_candidates[i]:
                coeffs[vn_s(i, j)] = 1.0
        if coeffs:
            m.add_row(f"route_swap_cap[{route.tail}]", coeffs, LE, 1.0,
                      "swap")
    for i in sorted(inst_.existing):
        for j in inst_.swap_candidates[i]:
            if i < j:
                m.add_row(f"swap_symmetry[{i}|{j}]",
                          {vn_s(i, j): 1.0, vn_s(j, i): -1.0}, EQ, 0.0,
                          "swap")

    # Swap-aware sequence preservation.
    for (i, j) in inst_.consecutive_pairs:
        sjk = {vn_s(j, k): 1.0 for k in inst_.swap_candidates[j]}
        for p in inst_.new_pairs:
            yin = b.y_or_zero(i, p.outbound)
            ymj = b.y_or_zero(p.inbound, j)
            x_terms = {}
            if yin:
                x_terms[yin] = 1.0
            if ymj:
                x_terms[ymj] = x_terms.get(ymj, 0.0) - 1.0
            if x_terms:
                if sjk:
                    m.add_abs_le(f"keep_sequence[{i}|{p.outbound}]",
                                 x_terms, 0.0, dict(sjk), 0.0, "sequence")
                else:
                    m.add_row(f"keep_sequence[{i}|{p.outbound}]", x_terms,
                              EQ, 0.0, "sequence")
            for k in inst_.swap_candidates[j]:
                ymk = b.y_or_zero(p.inbound, k)
                x_terms = {}
                if yin:
                    x_terms[yin] = 1.0
                if ymk:
                    x_terms[ymk] = x_terms.get(ymk, 0.0) - 1.0
                if x_terms:
                    m.add_abs_le(
                        f"swap_sequence[{i}|{p.outbound}|{k}]",
                        x_terms, 0.0, {vn_s(j, k): -1.0}, 1.0, "sequence")

    b.add_timing_rows()
    b.add_handoff_indicators()
    b.add_chain_indicators()
    b.add_cruise_gate_rows()
    b.add_revenue_and_spill_terms()
    b.add_baseline_and_crew()

    # Swap costs: half per stored direction, since s is symmetric.
    cfg = inst_.cost_config
    if opts.swap_cost_mode == "aircraft_dependent" and cfg.phi_matrix is None:
        raise FormulationError("aircraft-dependent swap costs need a "
                               "surcharge table (phi_matrix)")
    for i in sorted(inst_.existing):
        for j in inst_.swap_candidates[i]:
            if opts.swap_cost_mode == "aircraft_dependent":
                cost = cfg.psi + cfg.swap_surcharge(
                    inst_.flights[i].assigned_type,
                    inst_.flights[j].assigned_type)
            elif opts.swap_cost_mode == "flat":
                cost = cfg.psi
            else:
                raise FormulationError(
                    f"unknown swap_cost_mode {opts.swap_cost_mode!r}")
            m.add_objective_term(vn_s(i, j), -cost / 2.0, "swap")

    if opts.max_swap is not None:
        coeffs = {}
        for i in inst_.existing:
            for j in inst_.swap_candidates[i]:
                coeffs[vn_s(i, j)] = 1.0
        if coeffs:
            # s double-counts each swap (symmetric), hence the factor 2.
            m.add_row("max_swap_cap", coeffs, LE, 2.0 * opts.max_swap,
                      "swap")

    m.meta["kind"] = "ctcas"
    m.meta["instance"] = inst
    m.meta["options"] = opts
    m.audit()
    return m
