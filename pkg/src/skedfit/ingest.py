"""On-time-performance CSV ingestion.

Builds an instance skeleton the way the computational study builds its
sample: filter one carrier and day, group flights into routes by tail
number, drop routes that never visit the hub, split block time into a
30-minute non-cruise stage and a cruise stage compressible by 15%, and
open +/-90-minute departure windows around the schedule.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Dict, List, Optional

from .fuelburn import calibrate_coeffs
from .instance import (Airport, AircraftType, CostConfig, Flight, Instance,
                       InstanceError, Route)

DEFAULT_COLUMNS = {
    "tail": "TAIL_NUM",
    "origin": "ORIGIN",
    "dest": "DEST",
    "dep": "CRS_DEP_TIME",
    "arr": "CRS_ARR_TIME",
    "carrier": "OP_UNIQUE_CARRIER",
    "date": "FL_DATE",
}

NON_CRUISE = 30.0
COMPRESSION = 0.85
WINDOW = 90.0


@dataclass(frozen=True)
class IngestOptions:
    non_cruise: float = NON_CRUISE
    compression: float = COMPRESSION
    window: float = WINDOW
    default_seats: int = 180
    default_turnaround: float = 30.0
    default_burn_rate: float = 40.0   # kg/min at the efficient cruise time
    default_demand_fraction: float = 0.85


def _hhmm_to_minutes(text: str) -> float:
    text = text.strip().strip('"')
    if not text:
        raise InstanceError("empty schedule time")
    value = int(float(text))
    hours, minutes = divmod(value, 100)
    if hours > 24 or minutes >= 60:
        raise InstanceError(f"bad schedule time {text!r}")
    return float(hours * 60 + minutes)


def ingest_bts_csv(path, hub: str, carrier: Optional[str] = None,
                   date: Optional[str] = None,
                   columns: Optional[Dict[str, str]] = None,
                   options: Optional[IngestOptions] = None) -> Instance:
    """Instance skeleton from an on-time-performance extract.

    The result has routes, windows and cruise bounds but no new pairs; the
    caller adds demand points, fares and cost configuration before solving.
    """
    cols = dict(DEFAULT_COLUMNS)
    if columns:
        cols.update(columns)
    opt = options or IngestOptions()

    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise InstanceError(f"{path}: empty CSV")
        missing = [c for c in cols.values() if c not in reader.fieldnames]
        if missing:
            raise InstanceError(f"missing columns: {', '.join(missing)}")
        rows = []
        for row in reader:
            if carrier and row[cols["carrier"]].strip() != carrier:
                continue
            if date and row[cols["date"]].strip() != date:
                continue
            rows.append(row)
    if not rows:
        raise InstanceError("no rows left after carrier/date filters")

    by_tail: Dict[str, List[dict]] = {}
    for row in rows:
        tail = row[cols["tail"]].strip()
        if not tail:
            continue
        dep = _hhmm_to_minutes(row[cols["dep"]])
        arr = _hhmm_to_minutes(row[cols["arr"]])
        if arr < dep:
            arr += 1440.0  # lands past midnight
        by_tail.setdefault(tail, []).append({
            "origin": row[cols["origin"]].strip(),
            "dest": row[cols["dest"]].strip(),
            "dep": dep, "arr": arr,
        })

    type_id = "INGESTED"
    fleet_type = AircraftType(type_id, opt.default_seats,
                              opt.default_turnaround, 0.0)
    airports: Dict[str, Airport] = {}
    flights: List[Flight] = []
    routes: List[Route] = []
    fid = 1
    for tail in sorted(by_tail):
        legs = sorted(by_tail[tail], key=lambda r: r["dep"])
        for prev, nxt in zip(legs, legs[1:]):
            if nxt["dep"] < prev["arr"]:
                raise InstanceError(
                    f"tail {tail}: flights are not chronological "
                    f"({prev['dest']} arrives {prev['arr']}, next departs "
                    f"{nxt['dep']})")
        if not any(leg["origin"] == hub or leg["dest"] == hub
                   for leg in legs):
            continue  # the hub never sees this aircraft
        chained = all(a["dest"] == b["origin"]
                      for a, b in zip(legs, legs[1:]))
        if not chained:
            raise InstanceError(f"tail {tail}: route not airport-chained")
        ids = []
        for leg in legs:
            block = leg["arr"] - leg["dep"]
            u = block - opt.non_cruise
            if u <= 0:
                raise InstanceError(
                    f"tail {tail}: block time {block} leaves no cruise "
                    f"stage")
            lo = opt.compression * u
            for code in (leg["origin"], leg["dest"]):
                airports.setdefault(code, Airport(code))
            coeffs = calibrate_coeffs(u, opt.default_burn_rate)
            flights.append(Flight(
                id=str(fid), kind="existing",
                hub_direction="inbound" if leg["dest"] == hub
                else "outbound",
                origin=leg["origin"], dest=leg["dest"],
                dep_window=(max(leg["dep"] - opt.window, 0.0),
                            leg["dep"] + opt.window),
                non_cruise=opt.non_cruise,
                cruise_bounds={type_id: (lo, u)},
                fuel={type_id: coeffs},
                orig_arrival=leg["arr"],
                demand=round(opt.default_demand_fraction
                             * opt.default_seats),
                assigned_type=type_id))
            ids.append(str(fid))
            fid += 1
        routes.append(Route(tail=tail, flights=tuple(ids)))
    if not flights:
        raise InstanceError(f"no route visits the hub {hub}")
    return Instance(list(airports.values()), [fleet_type], flights, routes,
                    [], [], CostConfig(), hub=hub)
