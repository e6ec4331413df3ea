"""Schedule data model: airports, fleets, flights, routes, new pairs.

All times are minutes from midnight of the schedule day (monotone past 1440
for post-midnight arrivals), fuel in kg, money in dollars.  Instances are
immutable after construction and safe to share across solver workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Dict, List, Optional, Tuple

from .fuelburn import FuelCoeffs

EXISTING = "existing"
NEW = "new"
INBOUND = "inbound"
OUTBOUND = "outbound"

SCHEMA_VERSION = 1


class InstanceError(ValueError):
    """A structural or invariant violation in instance data."""


@dataclass(frozen=True)
class Airport:
    code: str
    congestion: float = 1.0

    def __post_init__(self):
        if not self.congestion > 0.0:
            raise InstanceError(f"airport {self.code}: congestion must be > 0")


@dataclass(frozen=True)
class AircraftType:
    id: str
    seats: int
    base_turnaround: float
    mrc_speed: float = 0.0  # km/h, informational
    fuel_coefficient_defaults: Optional[FuelCoeffs] = None

    def __post_init__(self):
        if self.seats < 1:
            raise InstanceError(f"aircraft type {self.id}: seats must be >= 1")
        if not self.base_turnaround > 0.0:
            raise InstanceError(
                f"aircraft type {self.id}: base turnaround must be > 0")


@dataclass(frozen=True)
class Flight:
    id: str
    kind: str                      # existing | new
    hub_direction: str             # inbound | outbound (relative to the hub)
    origin: str
    dest: str
    dep_window: Tuple[float, float]
    non_cruise: float
    cruise_bounds: Dict[str, Tuple[float, float]]   # type -> [lo, hi] minutes
    fuel: Dict[str, FuelCoeffs] = field(default_factory=dict)
    orig_arrival: Optional[float] = None            # existing only
    demand: float = 0.0
    fare: Optional[float] = None                    # new only
    assigned_type: Optional[str] = None             # existing only

    def __post_init__(self):
        if self.kind not in (EXISTING, NEW):
            raise InstanceError(f"flight {self.id}: bad kind {self.kind!r}")
        if self.hub_direction not in (INBOUND, OUTBOUND):
            raise InstanceError(
                f"flight {self.id}: bad hub_direction {self.hub_direction!r}")
        lo, hi = self.dep_window
        if lo > hi:
            raise InstanceError(f"flight {self.id}: departure window inverted")
        if lo < 0:
            raise InstanceError(
                f"flight {self.id}: departure window must be nonnegative")
        if self.non_cruise < 0:
            raise InstanceError(f"flight {self.id}: non-cruise time negative")
        if not self.cruise_bounds:
            raise InstanceError(f"flight {self.id}: no cruise bounds offered")
        for t, (cl, cu) in self.cruise_bounds.items():
            if not (0.0 < cl <= cu):
                raise InstanceError(
                    f"flight {self.id}: cruise bounds for type {t} must "
                    f"satisfy 0 < lo <= hi")
        if self.kind == EXISTING:
            if self.orig_arrival is None:
                raise InstanceError(
                    f"existing flight {self.id}: missing original arrival")
            if self.assigned_type is None:
                raise InstanceError(
                    f"existing flight {self.id}: missing assigned type")
            if self.assigned_type not in self.cruise_bounds:
                raise InstanceError(
                    f"existing flight {self.id}: no cruise bounds for its "
                    f"assigned type {self.assigned_type}")
        else:
            if self.fare is None:
                raise InstanceError(f"new flight {self.id}: missing fare")
        if self.demand < 0:
            raise InstanceError(f"flight {self.id}: negative demand")


@dataclass(frozen=True)
class Route:
    tail: str
    flights: Tuple[str, ...]


@dataclass(frozen=True)
class NewPair:
    outbound: str
    inbound: str


@dataclass(frozen=True)
class ConnectionEdge:
    from_flight: str
    to_flight: str
    min_minutes: float

    def __post_init__(self):
        if not self.min_minutes > 0:
            raise InstanceError(
                f"connection {self.from_flight}->{self.to_flight}: "
                f"minimum time must be > 0")


@dataclass(frozen=True)
class CostConfig:
    c_fuel: float = 1.2           # $/kg fuel
    c_co2: float = 0.2            # $/kg CO2
    emission_factor: float = 3.15  # kg CO2 per kg fuel
    rho: float = 5.0              # tardiness penalty coefficient
    zeta: float = 1.5             # tardiness penalty exponent
    grace: float = 15.0           # minutes of unpenalized tardiness
    psi: float = 500.0            # $ per swap
    phi_matrix: Optional[Dict[str, Dict[str, float]]] = None
    crew_service: float = 0.0     # $ total for new flights
    sigma_base: float = 60.0      # $ per spilled passenger, base value

    def __post_init__(self):
        for name in ("c_fuel", "c_co2", "emission_factor", "rho", "grace",
                     "psi", "crew_service", "sigma_base"):
            if getattr(self, name) < 0:
                raise InstanceError(f"cost config: {name} must be nonnegative")
        if not self.zeta > 1.0:
            raise InstanceError("cost config: zeta must be > 1")

    def swap_surcharge(self, type_a: str, type_b: str) -> float:
        """Symmetric per-swap surcharge between two aircraft types.

        The surcharge table is oriented row = from-type, column = to-type;
        a swap touches both directions, so both entries are summed.
        """
        if self.phi_matrix is None:
            return 0.0
        try:
            fwd = self.phi_matrix[type_a][type_b]
            bwd = self.phi_matrix[type_b][type_a]
        except KeyError as exc:
            raise InstanceError(
                f"swap surcharge table missing pair ({type_a}, {type_b})"
            ) from exc
        return fwd + bwd


@dataclass(frozen=True)
class SwapPolicy:
    """Rules for deciding which flight pairs are swappable.

    Default: both flights depart the same airport and the ground-presence
    windows of the two incoming aircraft at that airport overlap.
    """

    same_origin: bool = True
    require_ground_overlap: bool = True


class Instance:
    """Validated, immutable schedule instance with derived index structures."""

    def __init__(self, airports, aircraft_types, flights, routes, new_pairs,
                 connections, cost_config,
                 swap_candidates: Optional[Dict[str, List[str]]] = None,
                 hub: Optional[str] = None):
        self.airports: Dict[str, Airport] = {a.code: a for a in airports}
        if len(self.airports) != len(airports):
            raise InstanceError("duplicate airport codes")
        self.aircraft_types: Dict[str, AircraftType] = {
            t.id: t for t in aircraft_types}
        if len(self.aircraft_types) != len(aircraft_types):
            raise InstanceError("duplicate aircraft type ids")
        self.flights: Dict[str, Flight] = {f.id: f for f in flights}
        if len(self.flights) != len(flights):
            raise InstanceError("duplicate flight ids")
        if not self.flights:
            raise InstanceError("no flights")
        self.routes: Tuple[Route, ...] = tuple(routes)
        self.new_pairs: Tuple[NewPair, ...] = tuple(new_pairs)
        self.connections: Tuple[ConnectionEdge, ...] = tuple(connections)
        self.cost_config: CostConfig = cost_config
        self._explicit_swaps = swap_candidates

        self._validate_references()
        self.hub = hub if hub is not None else self._infer_hub()
        self._build_indexes()
        self._validate_structure()
        self.swap_candidates: Dict[str, Tuple[str, ...]] = {}
        if swap_candidates is not None:
            self._set_swap_candidates(
                {i: tuple(js) for i, js in swap_candidates.items()})
        else:
            self._set_swap_candidates(
                build_swap_candidates(self, SwapPolicy()))

    # -- derived sets ------------------------------------------------------

    def _validate_references(self):
        for f in self.flights.values():
            for code in (f.origin, f.dest):
                if code not in self.airports:
                    raise InstanceError(
                        f"flight {f.id}: unknown airport {code}")
            for t in f.cruise_bounds:
                if t not in self.aircraft_types:
                    raise InstanceError(
                        f"flight {f.id}: unknown aircraft type {t}")
            if f.kind == EXISTING and f.assigned_type not in self.aircraft_types:
                raise InstanceError(
                    f"flight {f.id}: unknown assigned type {f.assigned_type}")

    def _infer_hub(self) -> str:
        hubs = set()
        for pair in self.new_pairs:
            out = self.flights.get(pair.outbound)
            if out is not None:
                hubs.add(out.origin)
        if len(hubs) > 1:
            raise InstanceError(f"new pairs disagree on the hub: {sorted(hubs)}")
        if hubs:
            return hubs.pop()
        # No new pairs: fall back to the most visited airport.
        counts: Dict[str, int] = {}
        for f in self.flights.values():
            counts[f.origin] = counts.get(f.origin, 0) + 1
            counts[f.dest] = counts.get(f.dest, 0) + 1
        return max(sorted(counts), key=lambda c: counts[c])

    def _build_indexes(self):
        self.existing = [f.id for f in self.flights.values()
                         if f.kind == EXISTING]
        self.new = [f.id for f in self.flights.values() if f.kind == NEW]
        self.existing_inbound = [i for i in self.existing
                                 if self.flights[i].hub_direction == INBOUND]
        self.existing_outbound = [i for i in self.existing
                                  if self.flights[i].hub_direction == OUTBOUND]
        self.new_outbound = [i for i in self.new
                             if self.flights[i].hub_direction == OUTBOUND]
        self.new_inbound = [i for i in self.new
                            if self.flights[i].hub_direction == INBOUND]

        self.route_of: Dict[str, int] = {}
        self.predecessor: Dict[str, Optional[str]] = {}
        self.successor: Dict[str, Optional[str]] = {}
        self.consecutive_pairs: List[Tuple[str, str]] = []
        for r_idx, route in enumerate(self.routes):
            prev = None
            for fid in route.flights:
                if fid in self.route_of:
                    raise InstanceError(
                        f"flight {fid} appears on more than one route")
                self.route_of[fid] = r_idx
                self.predecessor[fid] = prev
                if prev is not None:
                    self.successor[prev] = fid
                    self.consecutive_pairs.append((prev, fid))
                prev = fid
            if prev is not None:
                self.successor[prev] = None

        self.connections_from: Dict[str, List[ConnectionEdge]] = {}
        for edge in self.connections:
            self.connections_from.setdefault(edge.from_flight, []).append(edge)

    def _validate_structure(self):
        for route in self.routes:
            if not route.flights:
                raise InstanceError(f"route {route.tail}: empty")
            for k in range(len(route.flights) - 1):
                a = self.flights[route.flights[k]]
                b = self.flights[route.flights[k + 1]]
                if a.dest != b.origin:
                    raise InstanceError(
                        f"route {route.tail} not airport-chained at "
                        f"{a.id}->{b.id} ({a.dest} vs {b.origin})")
            types = {self.flights[fid].assigned_type for fid in route.flights}
            if len(types) != 1:
                raise InstanceError(
                    f"route {route.tail}: mixed original aircraft types")
        routed = set(self.route_of)
        for fid in self.existing:
            if fid not in routed:
                raise InstanceError(f"existing flight {fid} is on no route")
        for fid in self.new:
            if fid in routed:
                raise InstanceError(f"new flight {fid} must not be on a route")
        paired = set()
        for pair in self.new_pairs:
            for fid in (pair.outbound, pair.inbound):
                if fid not in self.flights or self.flights[fid].kind != NEW:
                    raise InstanceError(f"new pair references non-new "
                                        f"flight {fid}")
                if fid in paired:
                    raise InstanceError(f"new flight {fid} in two pairs")
                paired.add(fid)
            out = self.flights[pair.outbound]
            inb = self.flights[pair.inbound]
            if out.hub_direction != OUTBOUND or inb.hub_direction != INBOUND:
                raise InstanceError(
                    f"new pair ({pair.outbound}, {pair.inbound}): "
                    f"hub directions inconsistent")
            if out.dest != inb.origin:
                raise InstanceError(
                    f"new pair ({pair.outbound}, {pair.inbound}): "
                    f"outbound destination differs from inbound origin")
            if out.origin != self.hub or inb.dest != self.hub:
                raise InstanceError(
                    f"new pair ({pair.outbound}, {pair.inbound}): "
                    f"must start and end at the hub {self.hub}")
        for fid in self.new:
            if fid not in paired:
                raise InstanceError(f"new flight {fid} belongs to no pair")
        for edge in self.connections:
            if edge.from_flight not in self.flights:
                raise InstanceError(
                    f"connection from unknown flight {edge.from_flight}")
            if edge.to_flight not in self.flights:
                raise InstanceError(
                    f"connection to unknown flight {edge.to_flight}")
            src = self.flights[edge.from_flight]
            dst = self.flights[edge.to_flight]
            if src.dest != self.hub or dst.origin != self.hub:
                raise InstanceError(
                    f"connection {edge.from_flight}->{edge.to_flight} must "
                    f"change planes at the hub")

    def _set_swap_candidates(self, cands: Dict[str, Tuple[str, ...]]):
        full = {i: tuple(sorted(set(cands.get(i, ())))) for i in self.existing}
        for i, js in full.items():
            for j in js:
                if j == i:
                    raise InstanceError(f"swap candidates: {i} lists itself")
                if j not in self.flights or self.flights[j].kind != EXISTING:
                    raise InstanceError(
                        f"swap candidates: {i} lists unknown flight {j}")
                if i not in full.get(j, ()):
                    raise InstanceError(
                        f"swap candidates not symmetric: {i}->{j}")
        self.swap_candidates = full

    # -- derived parameters ------------------------------------------------

    def turnaround(self, flight_id: str, type_id: str) -> float:
        return derive_turnaround(self.flights[flight_id],
                                 self.aircraft_types[type_id],
                                 self.airports)

    def spill_cost(self, flight_id: str) -> float:
        return derive_spill_cost(self.flights[flight_id], self.cost_config,
                                 self.airports)

    def offered_types(self, flight_id: str) -> List[str]:
        """Aircraft types with cruise bounds for this flight, sorted."""
        return sorted(self.flights[flight_id].cruise_bounds)

    def fuel_coeffs(self, flight_id: str, type_id: str) -> FuelCoeffs:
        f = self.flights[flight_id]
        if type_id in f.fuel:
            return f.fuel[type_id]
        default = self.aircraft_types[type_id].fuel_coefficient_defaults
        if default is None:
            raise InstanceError(
                f"flight {flight_id}: no fuel coefficients for type {type_id}")
        return default

    def summary(self) -> Dict[str, int]:
        return {
            "existing_flights": len(self.existing),
            "new_flights": len(self.new),
            "routes": len(self.routes),
            "new_pairs": len(self.new_pairs),
            "connections": len(self.connections),
            "aircraft_types": len(self.aircraft_types),
        }


def derive_turnaround(flight: Flight, actype: AircraftType,
                      airports: Dict[str, Airport]) -> float:
    """Turnaround minutes after this flight: base turnaround scaled by the
    destination airport's congestion."""
    if flight.dest not in airports:
        raise InstanceError(f"unknown airport {flight.dest}")
    return actype.base_turnaround * airports[flight.dest].congestion


def derive_spill_cost(flight: Flight, config: CostConfig,
                      airports: Dict[str, Airport]) -> float:
    """Per-passenger spill cost: base value scaled by endpoint congestion."""
    for code in (flight.origin, flight.dest):
        if code not in airports:
            raise InstanceError(f"unknown airport {code}")
    return (config.sigma_base * airports[flight.origin].congestion
            * airports[flight.dest].congestion)


def _ground_presence(inst: Instance, flight_id: str) -> Tuple[float, float]:
    """Window during which the incoming aircraft of a flight sits at the
    flight's origin: from its earliest possible arrival there (day start for
    a route's first flight) until the flight's latest departure."""
    f = inst.flights[flight_id]
    pred = inst.predecessor[flight_id]
    if pred is None:
        earliest = 0.0
    else:
        p = inst.flights[pred]
        lo = min(p.cruise_bounds[t][0] for t in p.cruise_bounds)
        tau = min(inst.turnaround(pred, t) for t in p.cruise_bounds)
        earliest = p.dep_window[0] + lo + p.non_cruise + tau
    return earliest, f.dep_window[1]


def build_swap_candidates(inst: Instance,
                          policy: SwapPolicy) -> Dict[str, Tuple[str, ...]]:
    """Symmetric, irreflexive swap-candidate sets over existing flights."""
    result: Dict[str, List[str]] = {i: [] for i in inst.existing}
    ids = sorted(inst.existing)
    for a_idx, i in enumerate(ids):
        for j in ids[a_idx + 1:]:
            if inst.route_of[i] == inst.route_of[j]:
                continue
            fi, fj = inst.flights[i], inst.flights[j]
            if policy.same_origin and fi.origin != fj.origin:
                continue
            if policy.require_ground_overlap:
                lo_i, hi_i = _ground_presence(inst, i)
                lo_j, hi_j = _ground_presence(inst, j)
                if max(lo_i, lo_j) > min(hi_i, hi_j):
                    continue
            result[i].append(j)
            result[j].append(i)
    return {i: tuple(sorted(js)) for i, js in result.items()}


# -- JSON serialization ----------------------------------------------------

def _money(value) -> float:
    """Money fields are decimal strings in files; parse exactly then float."""
    if isinstance(value, str):
        try:
            return float(Decimal(value))
        except InvalidOperation as exc:
            raise InstanceError(f"bad money value {value!r}") from exc
    if isinstance(value, (int, float)):
        return float(value)
    raise InstanceError(f"bad money value {value!r}")


def _money_str(value: float) -> str:
    return f"{value:.6f}".rstrip("0").rstrip(".") or "0"


def _coeffs_from_json(obj) -> FuelCoeffs:
    return FuelCoeffs(alpha=float(obj["alpha"]), beta=float(obj["beta"]),
                      gamma=float(obj["gamma"]), nu=float(obj["nu"]))


def _coeffs_to_json(c: FuelCoeffs):
    return {"alpha": c.alpha, "beta": c.beta, "gamma": c.gamma, "nu": c.nu}


def instance_from_dict(data: dict) -> Instance:
    try:
        airports = [Airport(code=a["code"],
                            congestion=float(a.get("congestion", 1.0)))
                    for a in data["airports"]]
        types = []
        for t in data["aircraft_types"]:
            coeffs = t.get("fuel_coefficient_defaults")
            types.append(AircraftType(
                id=t["id"], seats=int(t["seats"]),
                base_turnaround=float(t["base_turnaround"]),
                mrc_speed=float(t.get("mrc_speed", 0.0)),
                fuel_coefficient_defaults=(
                    _coeffs_from_json(coeffs) if coeffs else None)))
        flights = []
        for f in data["flights"]:
            flights.append(Flight(
                id=str(f["id"]), kind=f["kind"],
                hub_direction=f["hub_direction"],
                origin=f["origin"], dest=f["dest"],
                dep_window=(float(f["dep_window"][0]),
                            float(f["dep_window"][1])),
                non_cruise=float(f["non_cruise"]),
                cruise_bounds={t: (float(b[0]), float(b[1]))
                               for t, b in f["cruise_bounds"].items()},
                fuel={t: _coeffs_from_json(c)
                      for t, c in f.get("fuel", {}).items()},
                orig_arrival=(float(f["orig_arrival"])
                              if f.get("orig_arrival") is not None else None),
                demand=float(f.get("demand", 0)),
                fare=(_money(f["fare"]) if f.get("fare") is not None else None),
                assigned_type=f.get("assigned_type")))
        routes = [Route(tail=r["tail"], flights=tuple(r["flights"]))
                  for r in data["routes"]]
        pairs = [NewPair(outbound=p["outbound"], inbound=p["inbound"])
                 for p in data["new_pairs"]]
        conns = [ConnectionEdge(from_flight=c["from"], to_flight=c["to"],
                                min_minutes=float(c["min_minutes"]))
                 for c in data.get("connections", [])]
        cc = data["cost_config"]
        config = CostConfig(
            c_fuel=_money(cc.get("c_fuel", 1.2)),
            c_co2=_money(cc.get("c_co2", 0.2)),
            emission_factor=float(cc.get("emission_factor", 3.15)),
            rho=_money(cc.get("rho", 5.0)),
            zeta=float(cc.get("zeta", 1.5)),
            grace=float(cc.get("grace", 15.0)),
            psi=_money(cc.get("psi", 500.0)),
            phi_matrix=({a: {b: _money(v) for b, v in row.items()}
                         for a, row in cc["phi_matrix"].items()}
                        if cc.get("phi_matrix") else None),
            crew_service=_money(cc.get("crew_service", 0)),
            sigma_base=_money(cc.get("sigma_base", 60)))
        swaps = data.get("swap_candidates")
    except KeyError as exc:
        raise InstanceError(f"missing field {exc.args[0]!r}") from exc
    return Instance(airports, types, flights, routes, pairs, conns, config,
                    swap_candidates=swaps, hub=data.get("hub"))


def instance_to_dict(inst: Instance) -> dict:
    def flight_json(f: Flight) -> dict:
        out = {
            "id": f.id, "kind": f.kind, "hub_direction": f.hub_direction,
            "origin": f.origin, "dest": f.dest,
            "dep_window": list(f.dep_window), "non_cruise": f.non_cruise,
            "cruise_bounds": {t: list(b) for t, b in
                              sorted(f.cruise_bounds.items())},
            "demand": f.demand,
        }
        if f.fuel:
            out["fuel"] = {t: _coeffs_to_json(c)
                           for t, c in sorted(f.fuel.items())}
        if f.orig_arrival is not None:
            out["orig_arrival"] = f.orig_arrival
        if f.fare is not None:
            out["fare"] = _money_str(f.fare)
        if f.assigned_type is not None:
            out["assigned_type"] = f.assigned_type
        return out

    cc = inst.cost_config
    return {
        "schema_version": SCHEMA_VERSION,
        "hub": inst.hub,
        "airports": [{"code": a.code, "congestion": a.congestion}
                     for a in sorted(inst.airports.values(),
                                     key=lambda a: a.code)],
        "aircraft_types": [
            {"id": t.id, "seats": t.seats,
             "base_turnaround": t.base_turnaround, "mrc_speed": t.mrc_speed,
             **({"fuel_coefficient_defaults":
                 _coeffs_to_json(t.fuel_coefficient_defaults)}
                if t.fuel_coefficient_defaults else {})}
            for t in sorted(inst.aircraft_types.values(), key=lambda t: t.id)],
        "flights": [flight_json(f) for f in
                    sorted(inst.flights.values(), key=lambda f: f.id)],
        "routes": [{"tail": r.tail, "flights": list(r.flights)}
                   for r in inst.routes],
        "new_pairs": [{"outbound": p.outbound, "inbound": p.inbound}
                      for p in inst.new_pairs],
        "connections": [{"from": c.from_flight, "to": c.to_flight,
                         "min_minutes": c.min_minutes}
                        for c in inst.connections],
        "cost_config": {
            "c_fuel": _money_str(cc.c_fuel), "c_co2": _money_str(cc.c_co2),
            "emission_factor": cc.emission_factor,
            "rho": _money_str(cc.rho), "zeta": cc.zeta, "grace": cc.grace,
            "psi": _money_str(cc.psi),
            **({"phi_matrix": {a: {b: _money_str(v) for b, v in row.items()}
                               for a, row in cc.phi_matrix.items()}}
               if cc.phi_matrix else {}),
            "crew_service": _money_str(cc.crew_service),
            "sigma_base": _money_str(cc.sigma_base),
        },
        "swap_candidates": {i: list(js) for i, js in
                            sorted(inst.swap_candidates.items()) if js},
    }


def load_instance(path) -> Instance:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InstanceError(f"{path}: top level must be an object")
    return instance_from_dict(data)


def save_instance(inst: Instance, path):
    with open(path, "w") as fh:
        json.dump(instance_to_dict(inst), fh, indent=2, sort_keys=False)
        fh.write("\n")
