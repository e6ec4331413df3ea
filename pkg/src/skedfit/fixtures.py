"""Reference instances used by tests, experiments, and docs.

two_route_instance() is the hand-built two-aircraft schedule: a high-capacity
route (tail N53442, wide-body) and a fuel-efficient route (tail N45425,
narrow-body), plus one new round trip to MSP whose demand exceeds the small
aircraft's capacity.  Window geometry makes plain insertion feasible only on
the wide-body route, while a mid-afternoon swap of flights 451 and 623 opens
the cheaper narrow-body slot; this realizes the demand-must-be-met premise
and gives the swap mechanism a strictly profitable play.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .fuelburn import calibrate_coeffs
from .instance import (Airport, AircraftType, ConnectionEdge, CostConfig,
                       Flight, Instance, NewPair, Route)

WIDE = "B767_300"      # 218 seats, 40 min base turnaround, 876.70 km/h
NARROW = "A320_212"    # 180 seats, 30 min base turnaround, 868.79 km/h

_SPEED = {WIDE: 876.70, NARROW: 868.79}
_RATE = {WIDE: 87.0, NARROW: 40.0}   # kg/min at the efficient cruise time
_SEATS = {WIDE: 218, NARROW: 180}
_TURN = {WIDE: 40.0, NARROW: 30.0}

NON_CRUISE = 30.0
COMPRESSION = 0.85


def _cruise_offer(block: float, base_type: str,
                  types: Tuple[str, ...]) -> Dict[str, Tuple[float, float]]:
    """Per-type cruise windows for a leg planned with base_type.

    The planned cruise (block minus non-cruise stages) converts across types
    by the ratio of efficient cruise speeds; compression is capped at 15%.
    """
    u_base = block - NON_CRUISE
    out = {}
    for t in types:
        u = u_base * _SPEED[base_type] / _SPEED[t]
        out[t] = (COMPRESSION * u, u)
    return out


def _fuel_offer(bounds: Dict[str, Tuple[float, float]]):
    return {t: calibrate_coeffs(hi, _RATE[t]) for t, (_, hi) in
            bounds.items()}


def _flight(fid, kind, direction, orig, dest, dep, block, demand,
            types=(WIDE, NARROW), base_type=WIDE, fare=None,
            assigned=None, window=None) -> Flight:
    bounds = _cruise_offer(block, base_type, types)
    lo, hi = window if window else (dep - 90.0, dep + 90.0)
    return Flight(
        id=fid, kind=kind, hub_direction=direction, origin=orig, dest=dest,
        dep_window=(max(lo, 0.0), hi), non_cruise=NON_CRUISE,
        cruise_bounds=bounds, fuel=_fuel_offer(bounds),
        orig_arrival=(dep + block) if kind == "existing" else None,
        demand=demand, fare=fare, assigned_type=assigned)


def two_route_instance(sigma_base: float = 105.63,
                       psi: float = 500.0,
                       c_fuel: float = 1.2, c_co2: float = 0.2,
                       max_swap: Optional[int] = None,
                       phi_matrix=None) -> Instance:
    airports = [Airport("ORD"), Airport("MCO"), Airport("IAH"),
                Airport("MSP")]
    types = [AircraftType(WIDE, _SEATS[WIDE], _TURN[WIDE], _SPEED[WIDE]),
             AircraftType(NARROW, _SEATS[NARROW], _TURN[NARROW],
                          _SPEED[NARROW])]
    flights = [
        _flight("1586", "existing", "outbound", "ORD", "MCO", 480, 184, 200,
                base_type=WIDE, assigned=WIDE),
        _flight("633", "existing", "inbound", "MCO", "ORD", 720, 187, 180,
                base_type=WIDE, assigned=WIDE),
        _flight("451", "existing", "outbound", "ORD", "IAH", 1090, 188, 190,
                base_type=WIDE, assigned=WIDE),
        _flight("584", "existing", "inbound", "IAH", "ORD", 1350, 170, 186,
                base_type=WIDE, assigned=WIDE),
        _flight("527", "existing", "outbound", "ORD", "IAH", 525, 182, 151,
                base_type=NARROW, assigned=NARROW),
        # 680 rather than 662: the airline holds the early edge of this
        # window so the return from MSP cannot reach flight 623 in time,
        # while flight 451 (post-swap) is still reachable.
        _flight("521", "existing", "inbound", "IAH", "ORD", 752, 183, 154,
                base_type=NARROW, assigned=NARROW, window=(680.0, 842.0)),
        _flight("623", "existing", "outbound", "ORD", "MCO", 1020, 182, 160,
                base_type=NARROW, assigned=NARROW),
        _flight("679", "existing", "inbound", "MCO", "ORD", 1270, 190, 163,
                base_type=NARROW, assigned=NARROW),
        _flight("1842", "new", "outbound", "ORD", "MSP", 795, 100, 183,
                base_type=WIDE, fare=125.0),
        _flight("430", "new", "inbound", "MSP", "ORD", 970, 105, 168,
                base_type=WIDE, fare=161.0),
    ]
    routes = [Route("N53442", ("1586", "633", "451", "584")),
              Route("N45425", ("527", "521", "623", "679"))]
    pairs = [NewPair(outbound="1842", inbound="430")]
    config = CostConfig(c_fuel=c_fuel, c_co2=c_co2, rho=5.0, zeta=1.5,
                        grace=15.0, psi=psi, crew_service=4400.0,
                        sigma_base=sigma_base, phi_matrix=phi_matrix)
    return Instance(airports, types, flights, routes, pairs, [], config)


def tiny_instance(fare: float = 200.0, demand: float = 100.0,
                  window_pad: float = 90.0) -> Instance:
    """One route, two legs, one insertable pair; solvable by inspection."""
    airports = [Airport("HUB"), Airport("AAA"), Airport("BBB")]
    types = [AircraftType(NARROW, _SEATS[NARROW], _TURN[NARROW],
                          _SPEED[NARROW])]
    flights = [
        _flight("F1", "existing", "inbound", "AAA", "HUB", 480, 120, 100,
                types=(NARROW,), base_type=NARROW, assigned=NARROW,
                window=(480 - window_pad, 480 + window_pad)),
        _flight("F2", "existing", "outbound", "HUB", "AAA", 900, 120, 100,
                types=(NARROW,), base_type=NARROW, assigned=NARROW,
                window=(900 - window_pad, 900 + window_pad)),
        _flight("N1", "new", "outbound", "HUB", "BBB", 650, 90, demand,
                types=(NARROW,), base_type=NARROW, fare=fare,
                window=(650 - window_pad, 650 + window_pad)),
        _flight("N2", "new", "inbound", "BBB", "HUB", 770, 90, demand,
                types=(NARROW,), base_type=NARROW, fare=fare,
                window=(770 - window_pad, 770 + window_pad)),
    ]
    routes = [Route("T1", ("F1", "F2"))]
    pairs = [NewPair(outbound="N1", inbound="N2")]
    config = CostConfig(rho=5.0, zeta=1.5, grace=15.0, psi=500.0,
                        crew_service=1000.0, sigma_base=60.0)
    return Instance(airports, types, flights, routes, pairs, [], config)
