"""Computational-study harness: instance generation and the four studies.

Instances follow the published aircraft-parameter table (six types) and the
stated demand/fare ranges; seeds make every generated artifact byte-stable.
Scales: "desk" keeps everything enumerable by the oracle; "full" mirrors
the 300-flight/81-route shape of a hub day behind an explicit flag (no
speed claim is made for the in-repo solver at that scale).
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import bnb, verify
from .formulations import (CtcBuildOptions, CtcasBuildOptions, build_ctc,
                           build_ctcas)
from .fuelburn import calibrate_coeffs
from .instance import (Airport, AircraftType, CostConfig, Flight, Instance,
                       NewPair, Route)

# Published aircraft parameters: seats, base turnaround (min), efficient
# cruise speed (km/h), mass (kg).
AIRCRAFT_TABLE = {
    "B727_228": (134, 32.0, 867.60, 74000.0),
    "B737_500": (122, 36.0, 859.20, 50000.0),
    "MD_83": (148, 26.0, 867.60, 61200.0),
    "A320_111": (172, 28.0, 855.15, 62000.0),
    "A320_212": (180, 30.0, 868.79, 64000.0),
    "B767_300": (218, 40.0, 876.70, 135000.0),
}

# Demand ranges per original aircraft type (never exceeding capacity, so
# original assignments meet all demand).
DEMAND_RANGES = {
    "B727_228": (110, 134),
    "B737_500": (110, 122),
    "MD_83": (110, 148),
    "A320_111": (150, 172),
    "A320_212": (160, 180),
    "B767_300": (160, 218),
}

# Aircraft-dependent swap surcharges (row = from-type, column = to-type).
SWAP_SURCHARGE_TABLE = {
    "B727_228": {"B727_228": 0, "B737_500": 0, "MD_83": 0, "A320_111": 0,
                 "A320_212": 0, "B767_300": 0},
    "B737_500": {"B727_228": 0, "B737_500": 0, "MD_83": 0, "A320_111": 0,
                 "A320_212": 0, "B767_300": 0},
    "MD_83": {"B727_228": 100, "B737_500": 100, "MD_83": 0, "A320_111": 0,
              "A320_212": 0, "B767_300": 0},
    "A320_111": {"B727_228": 150, "B737_500": 150, "MD_83": 100,
                 "A320_111": 0, "A320_212": 0, "B767_300": 0},
    "A320_212": {"B727_228": 150, "B737_500": 150, "MD_83": 100,
                 "A320_111": 0, "A320_212": 0, "B767_300": 0},
    "B767_300": {"B727_228": 200, "B737_500": 200, "MD_83": 150,
                 "A320_111": 100, "A320_212": 100, "B767_300": 0},
}

NON_CRUISE = 30.0
COMPRESSION = 0.85
WINDOW = 90.0

_SPOKES = ("MCO", "IAH", "BOS", "DEN", "LGA", "DFW", "SEA", "PHX", "ATL",
           "SFO", "MIA", "CLT")
_NEW_POINTS = ("MSP", "STL", "CMH")


def nominal_burn_rate(type_id: str) -> float:
    """kg/min at the efficient cruise speed, interpolated linearly in mass
    through the two published anchor rates (87 and 40 kg/min)."""
    mass = AIRCRAFT_TABLE[type_id][3]
    return 40.0 + (mass - 64000.0) * (87.0 - 40.0) / (135000.0 - 64000.0)


@dataclass(frozen=True)
class FactorCell:
    c_fuel: float = 1.2
    sigma_base: float = 60.0
    psi: float = 500.0

    def label(self) -> str:
        return f"cf{self.c_fuel:g}_sb{self.sigma_base:g}_psi{self.psi:g}"


@dataclass(frozen=True)
class FactorDesign:
    c_fuel_levels: Tuple[float, float] = (0.6, 1.2)
    sigma_levels: Tuple[float, float] = (60.0, 200.0)
    psi_levels: Tuple[float, float] = (500.0, 1000.0)
    replications: int = 10
    seed: int = 0

    def cells(self) -> List[FactorCell]:
        out = []
        for psi in self.psi_levels:
            for sb in self.sigma_levels:
                for cf in self.c_fuel_levels:
                    out.append(FactorCell(c_fuel=cf, sigma_base=sb, psi=psi))
        return out


@dataclass
class FrontierPoint:
    max_swap: int
    profit: float
    spill_pct: float
    swaps_used: int
    status: str
    nodes: int = 0
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return {"max_swap": self.max_swap, "profit": self.profit,
                "spill_pct": self.spill_pct, "swaps_used": self.swaps_used,
                "status": self.status, "nodes": self.nodes,
                "wall_time": self.wall_time}


@dataclass(frozen=True)
class Scale:
    n_routes: int
    legs_per_route: int
    n_pairs: int
    n_types: int

    @staticmethod
    def named(name: str) -> "Scale":
        if name == "desk":
            return Scale(n_routes=3, legs_per_route=4, n_pairs=1, n_types=2)
        if name == "full":
            return Scale(n_routes=81, legs_per_route=4, n_pairs=3,
                         n_types=6)
        raise ValueError(f"unknown scale {name!r}; use desk or full "
                         f"or a Scale(...)")


def _cruise_offer(cruise_ref: float, ref_type: str, types: Sequence[str]):
    out = {}
    ref_speed = AIRCRAFT_TABLE[ref_type][2]
    for t in types:
        u = cruise_ref * ref_speed / AIRCRAFT_TABLE[t][2]
        out[t] = (COMPRESSION * u, u)
    return out


def generate_instance(scale="desk", seed: int = 0,
                      cell: Optional[FactorCell] = None,
                      types: Optional[Sequence[str]] = None) -> Instance:
    """Seeded synthetic schedule around the hub; byte-stable per seed."""
    sc = Scale.named(scale) if isinstance(scale, str) else scale
    cell = cell or FactorCell()
    rng = np.random.default_rng(seed)
    if types is None:
        big = "B767_300"
        small = ["A320_212", "MD_83", "A320_111", "B737_500", "B727_228"]
        picks = [big] + [small[i] for i in
                         rng.choice(len(small), size=sc.n_types - 1,
                                    replace=False)]
        types = picks
    types = list(types)
    if sc.n_routes > len(_SPOKES) * 10:
        raise ValueError("scale too large for the spoke pool")

    type_objs = []
    for t in types:
        seats, turn, speed, _mass = AIRCRAFT_TABLE[t]
        type_objs.append(AircraftType(t, seats, turn, speed))
    airports = {code: Airport(code) for code in ("ORD",)}

    coeff_cache: Dict[Tuple[str, float], dict] = {}

    def fuel_for(bounds: Dict[str, Tuple[float, float]]):
        out = {}
        for t, (_, hi) in bounds.items():
            key = (t, round(hi, 6))
            if key not in coeff_cache:
                coeff_cache[key] = calibrate_coeffs(hi, nominal_burn_rate(t))
            out[t] = coeff_cache[key]
        return out

    flights: List[Flight] = []
    routes: List[Route] = []
    fid = 100
    for r in range(sc.n_routes):
        t_own = types[r % len(types)]
        seats = AIRCRAFT_TABLE[t_own][0]
        dlo, dhi = DEMAND_RANGES[t_own]
        spoke = _SPOKES[int(rng.integers(0, len(_SPOKES)))] + str(r)
        if spoke not in airports:
            airports[spoke] = Airport(spoke)
        cruise_ref = float(rng.uniform(95.0, 175.0))
        dep = float(rng.integers(390, 560))
        legs = []
        for leg in range(sc.legs_per_route):
            outbound = leg % 2 == 0
            block = cruise_ref + NON_CRUISE
            bounds = _cruise_offer(cruise_ref, t_own, types)
            flights.append(Flight(
                id=str(fid), kind="existing",
                hub_direction="outbound" if outbound else "inbound",
                origin="ORD" if outbound else spoke,
                dest=spoke if outbound else "ORD",
                dep_window=(max(dep - WINDOW, 0.0), dep + WINDOW),
                non_cruise=NON_CRUISE, cruise_bounds=bounds,
                fuel=fuel_for(bounds),
                orig_arrival=dep + block,
                demand=float(rng.integers(dlo, dhi + 1)),
                assigned_type=t_own))
            legs.append(str(fid))
            fid += 1
            turn = AIRCRAFT_TABLE[t_own][1]
            slack = float(rng.integers(10, 75))
            dep = dep + block + turn + slack
        routes.append(Route(tail=f"N{seed:03d}{r:02d}", flights=tuple(legs)))

    pairs: List[NewPair] = []
    new_specs = []
    inbound_arrivals = sorted(f.orig_arrival for f in flights
                              if f.hub_direction == "inbound")
    for p in range(sc.n_pairs):
        point = _NEW_POINTS[p % len(_NEW_POINTS)]
        airports.setdefault(point, Airport(point))
        cruise_ref = float(rng.uniform(55.0, 95.0))
        ref_type = types[0]
        # anchor the outbound window on a plausible host arrival
        anchor = float(inbound_arrivals[int(rng.integers(
            0, len(inbound_arrivals)))])
        max_turn = max(AIRCRAFT_TABLE[t][1] for t in types)
        dep_out = anchor + max_turn + float(rng.integers(0, 60))
        gap = float(rng.integers(60, 140))
        demand = float(rng.integers(120, 201))
        fares = (float(rng.integers(120, 351)), float(rng.integers(120, 351)))
        bounds = _cruise_offer(cruise_ref, ref_type, types)
        block = cruise_ref + NON_CRUISE
        out_id, in_id = str(fid), str(fid + 1)
        fid += 2
        flights.append(Flight(
            id=out_id, kind="new", hub_direction="outbound", origin="ORD",
            dest=point, dep_window=(dep_out - WINDOW, dep_out + WINDOW),
            non_cruise=NON_CRUISE, cruise_bounds=bounds,
            fuel=fuel_for(bounds), demand=demand, fare=fares[0]))
        flights.append(Flight(
            id=in_id, kind="new", hub_direction="inbound", origin=point,
            dest="ORD",
            dep_window=(dep_out + block + gap - WINDOW,
                        dep_out + block + gap + WINDOW),
            non_cruise=NON_CRUISE, cruise_bounds=bounds,
            fuel=fuel_for(bounds), demand=demand, fare=fares[1]))
        pairs.append(NewPair(outbound=out_id, inbound=in_id))
        new_specs.append((block * 2.0, 2))

    total_new_block_hours = sum(bh for bh, _ in new_specs) / 60.0
    crew = 400.0 * total_new_block_hours + 1500.0 * sum(
        k for _, k in new_specs)
    config = CostConfig(c_fuel=cell.c_fuel, c_co2=0.2, rho=5.0, zeta=1.5,
                        grace=15.0, psi=cell.psi, crew_service=crew,
                        sigma_base=cell.sigma_base)
    return Instance(list(airports.values()), type_objs, flights, routes,
                    pairs, [], config)


def _ctc_insertable(inst: Instance) -> bool:
    """True when at least one full insertion combination is time-feasible."""
    from . import oracle as _oracle
    for combo in _oracle.enumerate_combos(inst, "ctc"):
        timing = _oracle.build_timing(inst, "ctc", combo)
        if timing is None:
            continue
        probe = {fid: timing.f_bounds[fid][0] for fid in timing.flights}
        if _oracle.earliest_schedule(inst, timing, probe) is not None:
            return True
    return False


def generate_solvable_instance(scale="desk", seed: int = 0,
                               cell: Optional[FactorCell] = None,
                               max_resample: int = 60) -> Instance:
    """Regenerate with stepped seeds until insertion is genuinely feasible."""
    last = None
    for k in range(max_resample):
        try:
            inst = generate_instance(scale, seed + 10_000 * k, cell)
            build_ctc(inst)
            build_ctcas(inst)
            if not _ctc_insertable(inst):
                last = RuntimeError("no time-feasible insertion")
                continue
            return inst
        except Exception as exc:  # infeasible shape: resample
            last = exc
    raise RuntimeError(f"could not generate a solvable instance for seed "
                       f"{seed}: {last}")


# -- studies -------------------------------------------------------------------

@dataclass
class RunOutcome:
    label: str
    kind: str
    objective: float
    status: str
    nodes: int
    wall_time: float
    gap_pct: float
    spilled: Dict[str, float] = field(default_factory=dict)
    swaps_used: int = 0


def solve_instance(inst: Instance, kind: str, variant: str = "micq2+mc",
                   config: Optional[bnb.SolveConfig] = None,
                   max_swap: Optional[int] = None,
                   swap_cost_mode: str = "flat",
                   label: str = "") -> Tuple[RunOutcome, object]:
    if kind == "ctc":
        model = build_ctc(inst)
    else:
        model = build_ctcas(inst, CtcasBuildOptions(
            max_swap=max_swap, swap_cost_mode=swap_cost_mode))
    sol, stats = bnb.solve(model, variant, config)
    if sol is None:
        return RunOutcome(label, kind, float("nan"), stats.status,
                          stats.nodes, stats.wall_time, float("inf")), None
    if kind == "ctc":
        rep = verify.verify_ctc_solution(inst, sol)
    else:
        rep = verify.verify_ctcas_solution(inst, sol, max_swap=max_swap,
                                           swap_cost_mode=swap_cost_mode)
    if not rep.ok:
        raise RuntimeError(f"solver output failed the audit: "
                           f"{rep.summary()}")
    swaps = sum(1 for k, v in sol.values.items()
                if k.startswith("s[") and v > 0.5) // 2
    out = RunOutcome(label, kind, sol.objective, stats.status, stats.nodes,
                     stats.wall_time, stats.rel_gap_pct,
                     spilled=rep.spilled, swaps_used=swaps)
    return out, sol


def improvement_pct(ctc_obj: float, ctcas_obj: float) -> float:
    return 100.0 * (ctcas_obj - ctc_obj) / abs(ctc_obj)


def compare_ctc_ctcas(design: FactorDesign, scale="desk",
                      variant: str = "micq2+mc",
                      config: Optional[bnb.SolveConfig] = None,
                      threads: int = 1,
                      swap_cost_mode: str = "flat",
                      phi_matrix=None) -> List[dict]:
    """Per-cell min/avg/max profit improvement of swaps over pure re-timing."""
    rows = []
    for cell in design.cells():
        jobs = []
        for rep in range(design.replications):
            seed = design.seed + 1000 * rep + hash(cell.label()) % 997
            jobs.append((cell, rep, seed))

        def run(job):
            cell_, rep_, seed_ = job
            inst = generate_solvable_instance(scale, seed_, cell_)
            if phi_matrix is not None:
                inst = _with_phi(inst, phi_matrix)
            ctc, _ = solve_instance(inst, "ctc", variant, config,
                                    label=f"{cell_.label()}#{rep_}")
            ctcas, _ = solve_instance(inst, "ctcas", variant, config,
                                      swap_cost_mode=swap_cost_mode,
                                      label=f"{cell_.label()}#{rep_}")
            total_pax = sum(f.demand for f in inst.flights.values())
            spill_pax = sum(ctcas.spilled.values())
            return {
                "cell": cell_.label(), "replication": rep_, "seed": seed_,
                "ctc": ctc.objective, "ctcas": ctcas.objective,
                "improvement_pct": improvement_pct(ctc.objective,
                                                   ctcas.objective),
                "spill_pct": 100.0 * spill_pax / total_pax,
                "ctc_status": ctc.status, "ctcas_status": ctcas.status,
            }

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                rows.extend(pool.map(run, jobs))
        else:
            rows.extend(run(j) for j in jobs)
    return rows


def _with_phi(inst: Instance, phi) -> Instance:
    cfg = inst.cost_config
    new_cfg = CostConfig(c_fuel=cfg.c_fuel, c_co2=cfg.c_co2,
                         emission_factor=cfg.emission_factor, rho=cfg.rho,
                         zeta=cfg.zeta, grace=cfg.grace, psi=cfg.psi,
                         phi_matrix=phi, crew_service=cfg.crew_service,
                         sigma_base=cfg.sigma_base)
    return Instance(list(inst.airports.values()),
                    list(inst.aircraft_types.values()),
                    list(inst.flights.values()), list(inst.routes),
                    list(inst.new_pairs), list(inst.connections), new_cfg,
                    swap_candidates={i: list(js) for i, js in
                                     inst.swap_candidates.items()},
                    hub=inst.hub)


def summarize_improvements(rows: List[dict]) -> Dict[str, dict]:
    """min/avg/max improvement split by each factor level, plus overall."""
    def stats(sel):
        vals = [r["improvement_pct"] for r in sel]
        return {"min": min(vals), "avg": sum(vals) / len(vals),
                "max": max(vals), "count": len(vals),
                "statuses": sorted({r["ctcas_status"] for r in sel})}

    out = {"overall": stats(rows)}
    for factor, getter in (
            ("c_fuel", lambda r: r["cell"].split("_")[0]),
            ("sigma", lambda r: r["cell"].split("_")[1]),
            ("psi", lambda r: r["cell"].split("_")[2])):
        for level in sorted({getter(r) for r in rows}):
            sel = [r for r in rows if getter(r) == level]
            out[f"{factor}={level}"] = stats(sel)
    return out


def whatif_sweep(inst: Instance, k_max: int, variant: str = "micq2+mc",
                 config: Optional[bnb.SolveConfig] = None
                 ) -> List[FrontierPoint]:
    """Profit frontier over the permitted number of swaps."""
    points = []
    total_pax = sum(f.demand for f in inst.flights.values())
    for k in range(k_max + 1):
        out, _sol = solve_instance(inst, "ctcas", variant, config,
                                   max_swap=k, label=f"max_swap={k}")
        spill = sum(out.spilled.values())
        points.append(FrontierPoint(
            max_swap=k, profit=out.objective,
            spill_pct=100.0 * spill / total_pax,
            swaps_used=out.swaps_used, status=out.status,
            nodes=out.nodes, wall_time=out.wall_time))
    return points


def frontier_plateau(points: List[FrontierPoint], tol: float = 1e-6) -> int:
    """First swap budget after which profit stops improving."""
    for k in range(1, len(points)):
        if points[k].profit <= points[k - 1].profit + tol * max(
                1.0, abs(points[k - 1].profit)):
            return k - 1
    return len(points) - 1


def benchmark_formulations(instances: Iterable[Instance],
                           variants: Sequence[str] = ("micq1+bigm",
                                                      "micq1+mc",
                                                      "micq2+bigm",
                                                      "micq2+mc"),
                           kind: str = "ctcas",
                           config: Optional[bnb.SolveConfig] = None
                           ) -> List[dict]:
    """Nodes / cpu / gap per formulation variant, one row per variant."""
    per_variant: Dict[str, List[RunOutcome]] = {v: [] for v in variants}
    objectives: List[Dict[str, float]] = []
    for idx, inst in enumerate(instances):
        objs = {}
        for v in variants:
            out, _ = solve_instance(inst, kind, v, config,
                                    label=f"bench#{idx}")
            per_variant[v].append(out)
            objs[v] = out.objective
        objectives.append(objs)
    rows = []
    for v in variants:
        outs = per_variant[v]
        solved = [o for o in outs if o.status == "optimal"]
        unsolved = [o for o in outs if o.status != "optimal"]
        rows.append({
            "variant": v,
            "instances": len(outs),
            "nodes_avg": sum(o.nodes for o in outs) / len(outs),
            "cpu_avg_solved": (sum(o.wall_time for o in solved)
                               / len(solved)) if solved else None,
            "solved": len(solved),
            "gap_avg_unsolved": (sum(o.gap_pct for o in unsolved)
                                 / len(unsolved)) if unsolved else 0.0,
            "unsolved": len(unsolved),
        })
    return rows, objectives


def root_dominance_report(instances: Iterable[Instance],
                          kind: str = "ctcas",
                          config: Optional[bnb.SolveConfig] = None
                          ) -> List[dict]:
    """Continuous root bounds per variant, recording (not asserting) how
    often the McCormick bound dominates the big-M bound."""
    rows = []
    for idx, inst in enumerate(instances):
        model = build_ctc(inst) if kind == "ctc" else build_ctcas(inst)
        bounds = {}
        for variant in ("micq1+bigm", "micq1+mc", "micq2+bigm", "micq2+mc"):
            bounds[variant] = bnb.root_relaxation_bound(model, variant,
                                                        config)
        tol = 1e-5 * max(1.0, abs(bounds["micq2+mc"]))
        rows.append({
            "instance": idx, **bounds,
            "mc_dominates_micq1": bounds["micq1+mc"]
            <= bounds["micq1+bigm"] + tol,
            "mc_dominates_micq2": bounds["micq2+mc"]
            <= bounds["micq2+bigm"] + tol,
        })
    return rows


def swap_cost_study(design: FactorDesign, scale="desk",
                    phi=None, variant: str = "micq2+mc",
                    config: Optional[bnb.SolveConfig] = None,
                    threads: int = 1) -> List[dict]:
    """Factor study with aircraft-dependent swap surcharges applied."""
    phi = phi if phi is not None else SWAP_SURCHARGE_TABLE
    return compare_ctc_ctcas(design, scale, variant, config, threads,
                             swap_cost_mode="aircraft_dependent",
                             phi_matrix=phi)


# -- exports -------------------------------------------------------------------

def rows_to_csv(rows: List[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    for r in rows:
        writer.writerow(r)
    return buf.getvalue()


def frontier_to_gnuplot(points: List[FrontierPoint]) -> str:
    lines = ["# max_swap profit spill_pct swaps_used"]
    for p in points:
        lines.append(f"{p.max_swap} {p.profit!r} {p.spill_pct!r} "
                     f"{p.swaps_used}")
    return "\n".join(lines) + "\n"
