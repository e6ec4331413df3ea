"""Materialize symbolic turnaround indicators as linear rows.

Two interchangeable routes: big-M rows with deactivation constants tightened
from the variable bounds, or McCormick envelope systems over bilinear
"ready time x trigger" products.  Both leave the model indicator-free and
otherwise untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .instance import EXISTING, Instance
from .modelir import EQ, GE, INF, LE, Model, ModelError

VARIANTS = ("micq1+bigm", "micq1+mc", "micq2+bigm", "micq2+mc")


def parse_variant(selector: str) -> Tuple[str, str]:
    """Split a formulation selector like "micq2+mc" into (conic, logic)."""
    s = selector.strip().lower()
    if s not in VARIANTS:
        raise ValueError(f"unknown variant {selector!r}; "
                         f"expected one of {', '.join(VARIANTS)}")
    conic, logic = s.split("+")
    return conic, logic


@dataclass
class BigMConstants:
    """Smallest valid deactivation constants per indicator family."""

    kind: str
    to_new: Dict[Tuple[str, str], float] = field(default_factory=dict)
    from_new: Dict[Tuple[str, str], float] = field(default_factory=dict)
    chain: Dict[Tuple[str, str], float] = field(default_factory=dict)
    swap: Dict[Tuple[str, str], float] = field(default_factory=dict)


@dataclass
class VBounds:
    """Valid bounds on each flight's ready time (arrival plus turnaround)."""

    kind: str
    lo: Dict[str, float] = field(default_factory=dict)
    hi: Dict[str, float] = field(default_factory=dict)


def _type_range(inst: Instance, fid: str, kind: str):
    fl = inst.flights[fid]
    if kind == "ctc" and fl.kind == EXISTING:
        return [fl.assigned_type]
    return inst.offered_types(fid)


def _ready_hi(inst: Instance, fid: str, kind: str) -> float:
    """Upper bound on arrival + turnaround (maxima over offered types)."""
    fl = inst.flights[fid]
    types = _type_range(inst, fid, kind)
    return (fl.dep_window[1]
            + max(fl.cruise_bounds[t][1] for t in types)
            + fl.non_cruise
            + max(inst.turnaround(fid, t) for t in types))


def _ready_lo(inst: Instance, fid: str, kind: str) -> float:
    fl = inst.flights[fid]
    types = _type_range(inst, fid, kind)
    return (fl.dep_window[0]
            + min(fl.cruise_bounds[t][0] for t in types)
            + fl.non_cruise
            + min(inst.turnaround(fid, t) for t in types))


def compute_bigm(inst: Instance, which: str) -> BigMConstants:
    """Exact formula evaluation of the deactivation constants.

    Each constant is max(ready-time upper bound - successor's earliest
    departure, 0); maxima range over the types the flight's assignment
    variables actually offer.
    """
    if which not in ("ctc", "ctcas"):
        raise ValueError(f"which must be ctc or ctcas, got {which!r}")
    out = BigMConstants(kind=which)
    for n in inst.new_outbound:
        dn_lo = inst.flights[n].dep_window[0]
        for i in inst.existing_inbound:
            out.to_new[(i, n)] = max(_ready_hi(inst, i, which) - dn_lo, 0.0)
    for m in inst.new_inbound:
        fl_m = inst.flights[m]
        for j in inst.existing_outbound:
            dj_lo = inst.flights[j].dep_window[0]
            if which == "ctc":
                # Turnaround pinned to the hosting route's type.
                tau = inst.turnaround(m, inst.flights[j].assigned_type) \
                    if inst.flights[j].assigned_type in fl_m.cruise_bounds \
                    else max(inst.turnaround(m, t)
                             for t in inst.offered_types(m))
                hi = (fl_m.dep_window[1]
                      + max(fl_m.cruise_bounds[t][1]
                            for t in inst.offered_types(m))
                      + fl_m.non_cruise + tau)
            else:
                hi = _ready_hi(inst, m, which)
            out.from_new[(m, j)] = max(hi - dj_lo, 0.0)
    for (i, j) in inst.consecutive_pairs:
        dj_lo = inst.flights[j].dep_window[0]
        out.chain[(i, j)] = max(_ready_hi(inst, i, which) - dj_lo, 0.0)
        if which == "ctcas":
            for k in inst.swap_candidates[j]:
                dk_lo = inst.flights[k].dep_window[0]
                out.swap[(i, k)] = max(_ready_hi(inst, i, which) - dk_lo, 0.0)
    return out


def compute_vbounds(inst: Instance, which: str) -> VBounds:
    """Bounds on the ready-time expressions used by McCormick envelopes."""
    if which not in ("ctc", "ctcas"):
        raise ValueError(f"which must be ctc or ctcas, got {which!r}")
    out = VBounds(kind=which)
    for fid in inst.flights:
        out.hi[fid] = _ready_hi(inst, fid, which)
        out.lo[fid] = _ready_lo(inst, fid, which)
        if out.lo[fid] > out.hi[fid]:
            raise ValueError(f"flight {fid}: ready-time bounds inverted")
    return out


def _lookup_delta(constants: BigMConstants, family: str, payload) -> float:
    try:
        if family == "to_new":
            return constants.to_new[(payload[0], payload[1])]
        if family == "from_new":
            return constants.from_new[(payload[0], payload[1])]
        if family == "chain":
            return constants.chain[(payload[0], payload[1])]
        if family == "swap_chain":
            return constants.swap[(payload[0], payload[1])]
    except KeyError:
        pass
    raise ModelError(f"indicator family {family!r} with payload {payload} "
                     f"has no matching big-M constant")


def apply_bigm(model: Model, constants: Optional[BigMConstants] = None
               ) -> Model:
    """Replace every indicator with one linear row deactivated by its
    trigger, using the tightened constants."""
    if constants is None:
        constants = compute_bigm(model.meta["instance"], model.meta["kind"])
    out = model.clone()
    indicators, out.indicators = out.indicators, []
    for ind in indicators:
        delta = _lookup_delta(constants, ind.family, ind.payload)
        coeffs = {ind.target: 1.0}
        for v, c in ind.ready_terms.items():
            coeffs[v] = coeffs.get(v, 0.0) - c
        if ind.trigger_value == 1:
            # target - ready >= const - delta * (1 - trigger)
            t = ind.trigger_vars[0]
            coeffs[t] = coeffs.get(t, 0.0) - delta
            rhs = ind.ready_const - delta
        else:
            # target - ready >= const - delta * sum(triggers)
            for t in ind.trigger_vars:
                coeffs[t] = coeffs.get(t, 0.0) + delta
            rhs = ind.ready_const
        out.add_row(f"{ind.name}.bigm", coeffs, GE, rhs, "bigm")
    out.meta["logic"] = "bigm"
    return out


def apply_mccormick(model: Model, vbounds: Optional[VBounds] = None) -> Model:
    """Replace every indicator with a McCormick system over an auxiliary
    bilinear variable.

    Retained estimators: upper-by-trigger, lower-by-trigger, and the lower
    tie to the ready time; the fourth (upper tie) is redundant for enforcing
    the precedence and is omitted.  Requires nonnegative departure bounds on
    the target (guaranteed by instance validation).
    """
    if vbounds is None:
        vbounds = compute_vbounds(model.meta["instance"], model.meta["kind"])
    out = model.clone()
    indicators, out.indicators = out.indicators, []
    registered_v: Dict[str, str] = {}

    def v_var(ind) -> Tuple[str, float, float]:
        fid = ind.v_flight
        terms = ind.v_terms if ind.v_terms is not None else ind.ready_terms
        const = ind.v_const if ind.v_const is not None else ind.ready_const
        try:
            vl, vu = vbounds.lo[fid], vbounds.hi[fid]
        except KeyError:
            raise ModelError(f"missing ready-time bounds for flight {fid}")
        name = f"v[{fid}]"
        if name not in registered_v:
            out.add_variable(name, vl, vu, "v")
            coeffs = {name: 1.0}
            for v, c in terms.items():
                coeffs[v] = coeffs.get(v, 0.0) - c
            out.add_row(f"ready_def[{fid}]", coeffs, EQ, const, "mccormick")
            registered_v[name] = fid
        return name, vl, vu

    for ind in indicators:
        v, vl, vu = v_var(ind)
        om = f"om[{ind.name}]"
        out.add_variable(om, min(0.0, vl), max(0.0, vu), "omega")
        out.add_row(f"{ind.name}.link", {ind.target: 1.0, om: -1.0}, GE, 0.0,
                    "mccormick")
        if ind.trigger_value == 1:
            t = ind.trigger_vars[0]
            out.add_row(f"{ind.name}.mc_ub", {om: 1.0, t: -vu}, LE, 0.0,
                        "mccormick")
            out.add_row(f"{ind.name}.mc_lb", {om: 1.0, t: -vl}, GE, 0.0,
                        "mccormick")
            out.add_row(f"{ind.name}.mc_tie", {om: 1.0, v: -1.0, t: -vu},
                        GE, -vu, "mccormick")
        else:
            ub = {om: 1.0}
            lb = {om: 1.0}
            tie = {om: 1.0, v: -1.0}
            for t in ind.trigger_vars:
                ub[t] = vu
                lb[t] = vl
                tie[t] = vu
            out.add_row(f"{ind.name}.mc_ub", ub, LE, vu, "mccormick")
            out.add_row(f"{ind.name}.mc_lb", lb, GE, vl, "mccormick")
            out.add_row(f"{ind.name}.mc_tie", tie, GE, 0.0, "mccormick")
    out.meta["logic"] = "mc"
    return out


def apply_logic(model: Model, logic: str) -> Model:
    if logic == "bigm":
        return apply_bigm(model)
    if logic == "mc":
        return apply_mccormick(model)
    raise ValueError(f"unknown logic {logic!r}")
