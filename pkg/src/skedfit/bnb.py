"""Exact solver: branch-and-bound over conic relaxations.

Branches on fractional binaries (swap decisions first, then fleet
assignments, then insertion arcs), bounds each node with the interior-point
relaxation of the selected conic/linearization variant, polishes integral
leaves by re-solving the continuous variables at fixed binaries, and keeps
an event log of node and incumbent activity.  Deterministic for a fixed
seed in single-thread mode.
"""

from __future__ import annotations

import heapq
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from . import cones, linearize
from .ipm import IpmOptions
from .modelir import Model
from .solution import Solution, SolveStats


class SolveError(RuntimeError):
    pass


@dataclass
class SolveConfig:
    time_limit: float = 18000.0
    rel_gap: float = 1e-4
    int_tol: float = 1e-5
    branching: str = "most-fractional"   # or pseudo-cost
    node_order: str = "best-bound"       # or depth-first
    threads: int = 1
    seed: int = 0
    feastol: float = 1e-7
    gaptol: float = 1e-7
    polish_feastol: float = 1e-9
    polish_gaptol: float = 1e-10
    max_nodes: int = 2_000_000

    def __post_init__(self):
        if self.time_limit <= 0 or self.rel_gap <= 0 or self.int_tol <= 0:
            raise ValueError("limits must be positive")
        if self.branching != "most-fractional":
            raise ValueError(f"branching rule {self.branching!r} is not "
                             f"implemented; use most-fractional")
        if self.node_order not in ("best-bound", "depth-first"):
            raise ValueError(f"unknown node order {self.node_order!r}")


_ROLE_PRIORITY = {"s": 0, "z": 1, "y": 2}


class _Implications:
    """Cheap fixing propagation harvested from the model's binary rows.

    Covers three row shapes over binaries only: pairwise equalities
    (x = y and x + y = 1), at-most-one rows, and exactly-one rows.
    """

    def __init__(self, model: Model):
        binset = {v.id for v in model.binaries()}
        self.equal: Dict[str, List[Tuple[str, bool]]] = {}
        self.amo: List[List[str]] = []
        self.exactly_one: List[List[str]] = []
        for row in model.rows:
            vars_ = list(row.coeffs)
            if not all(v in binset for v in vars_):
                continue
            coefs = [row.coeffs[v] for v in vars_]
            if row.sense == "==" and len(vars_) == 2:
                a, b = vars_
                ca, cb = coefs
                if ca == -cb and row.rhs == 0.0:
                    self.equal.setdefault(a, []).append((b, True))
                    self.equal.setdefault(b, []).append((a, True))
                elif ca == cb and row.rhs == ca:
                    self.equal.setdefault(a, []).append((b, False))
                    self.equal.setdefault(b, []).append((a, False))
            if all(c == 1.0 for c in coefs) and row.rhs == 1.0:
                if row.sense == "<=":
                    self.amo.append(vars_)
                elif row.sense == "==":
                    self.exactly_one.append(vars_)
        self.member_rows: Dict[str, List[int]] = {}
        self.rows_all = self.amo + self.exactly_one
        self.n_amo = len(self.amo)
        for ridx, vars_ in enumerate(self.rows_all):
            for v in vars_:
                self.member_rows.setdefault(v, []).append(ridx)

    def propagate(self, fixings: Dict[str, Tuple[float, float]]
                  ) -> Optional[Dict[str, Tuple[float, float]]]:
        """Close fixings under the implications; None when contradictory."""
        state: Dict[str, int] = {}
        for v, (lo, hi) in fixings.items():
            if lo == hi and lo in (0.0, 1.0):
                state[v] = int(lo)
        queue = list(state.items())
        while queue:
            v, val = queue.pop()
            for (w, same) in self.equal.get(v, ()):
                want = val if same else 1 - val
                have = state.get(w)
                if have is None:
                    state[w] = want
                    queue.append((w, want))
                elif have != want:
                    return None
            if val == 1:
                for ridx in self.member_rows.get(v, ()):
                    for w in self.rows_all[ridx]:
                        if w == v:
                            continue
                        have = state.get(w)
                        if have is None:
                            state[w] = 0
                            queue.append((w, 0))
                        elif have == 1:
                            return None
            for ridx in self.member_rows.get(v, ()):
                if ridx < self.n_amo:
                    continue
                vars_ = self.rows_all[ridx]
                known = [state.get(w) for w in vars_]
                if all(k == 0 for k in known):
                    return None
                unknown = [w for w, k in zip(vars_, known) if k is None]
                if len(unknown) == 1 and sum(k or 0 for k in known) == 0:
                    w = unknown[0]
                    state[w] = 1
                    queue.append((w, 1))
        out = dict(fixings)
        for v, val in state.items():
            lo, hi = out.get(v, (0.0, 1.0))
            if val < lo - 1e-9 or val > hi + 1e-9:
                return None
            out[v] = (float(val), float(val))
        return out


def prepare(model: Model, variant: str) -> Model:
    """Linearize indicators and attach conic epigraphs per the selector."""
    conic, logic = linearize.parse_variant(variant)
    out = linearize.apply_logic(model, logic)
    out = cones.emit_fuel_epigraph(out, conic)
    out = cones.emit_penalty_epigraph(out)
    out.meta["variant"] = variant
    out.audit()
    return out


def root_relaxation_bound(model: Model, variant: str,
                          config: Optional[SolveConfig] = None) -> float:
    """Objective bound from the continuous relaxation at the root."""
    cfg = config or SolveConfig()
    prepared = prepare(model, variant)
    res = cones.solve_relaxation(
        prepared, options=IpmOptions(feastol=cfg.feastol,
                                     gaptol=cfg.gaptol))
    if res.status == "infeasible":
        raise SolveError("root relaxation infeasible")
    if res.status != "optimal":
        raise SolveError(f"root relaxation did not solve: {res.status}")
    return res.objective


@dataclass
class _Node:
    bound: float
    order: int
    depth: int
    fixings: Dict[str, Tuple[float, float]]

    def key(self, node_order: str):
        if node_order == "depth-first":
            return (-self.depth, self.order)
        return (-self.bound, self.order)


class _EventLog:
    def __init__(self, sink: Optional[Callable[[dict], None]]):
        self.sink = sink
        self.t0 = time.monotonic()
        self.events: List[dict] = []

    def emit(self, kind: str, **fields):
        ev = {"t": round(time.monotonic() - self.t0, 6), "event": kind}
        ev.update(fields)
        self.events.append(ev)
        if self.sink is not None:
            self.sink(ev)


def solve(model: Model, variant: str,
          config: Optional[SolveConfig] = None,
          event_sink: Optional[Callable[[dict], None]] = None,
          should_stop: Optional[Callable[[], bool]] = None
          ) -> Tuple[Optional[Solution], SolveStats]:
    """Maximize the model exactly; returns (incumbent, stats).

    The incumbent is None only when the problem is infeasible.
    """
    cfg = config or SolveConfig()
    model.audit()
    prepared = prepare(model, variant)
    binaries = sorted(v.id for v in prepared.binaries())
    impl = _Implications(prepared)
    relax_opts = IpmOptions(feastol=cfg.feastol, gaptol=cfg.gaptol)
    polish_opts = IpmOptions(feastol=cfg.polish_feastol,
                             gaptol=cfg.polish_gaptol, dres_tol=1e-7,
                             max_iter=200)
    log = _EventLog(event_sink)
    t_start = time.monotonic()

    incumbent: Optional[Solution] = None
    inc_obj = -math.inf
    heap: List[Tuple] = []
    counter = 0
    root = _Node(bound=math.inf, order=0, depth=0, fixings={})
    heapq.heappush(heap, (root.key(cfg.node_order), root))
    nodes_done = 0
    status = "optimal"
    root_infeasible = False
    exactness_lost = False

    def timed_out() -> bool:
        return time.monotonic() - t_start > cfg.time_limit

    def gap_pct(bound: float) -> float:
        if inc_obj == -math.inf:
            return math.inf
        return 100.0 * (bound - inc_obj) / max(abs(inc_obj), 1e-9)

    def gap_met(bound: float) -> bool:
        if inc_obj == -math.inf:
            return False
        return bound - inc_obj <= cfg.rel_gap * max(abs(inc_obj), 1.0)

    def pick_branch(values: Dict[str, float]) -> Optional[str]:
        best = None
        best_key = None
        for vid in binaries:
            val = values.get(vid, 0.0)
            frac = min(val, 1.0 - val)
            if frac <= cfg.int_tol:
                continue
            key = (_ROLE_PRIORITY.get(prepared.variables[vid].role, 3),
                   -frac, vid)
            if best_key is None or key < best_key:
                best_key = key
                best = vid
        return best

    def settle(values: Dict[str, float]) -> Solution:
        """Make an integral iterate exactly self-consistent.

        Binaries snap to 0/1, arrivals and tardiness recompute from the
        schedule, and the epigraph variables take their closed-form values,
        so the reported objective is the true profit of the solution.
        """
        out = dict(values)
        inst = model.meta["instance"]
        grace = prepared.meta.get("grace", inst.cost_config.grace)
        for vid in binaries:
            out[vid] = float(round(out.get(vid, 0.0)))
        cruise_of: Dict[str, float] = {}
        for term in prepared.meta.get("fuel_terms", ()):
            z, f = term["z"], term["f"]
            if z is not None and out.get(z, 0.0) < 0.5:
                out[f] = 0.0
                for aux in ("p", "q", "r", "h"):
                    out[term[aux]] = 0.0
                for aux in (f"wq[{term['flight']}|{term['type']}]",
                            f"wr[{term['flight']}|{term['type']}]"):
                    if aux in out:
                        out[aux] = 0.0
            else:
                fv = max(out.get(f, 0.0), 1e-9)
                co = term["coeffs"]
                out[term["p"]] = co.alpha / fv
                out[term["q"]] = co.beta / fv ** 2
                out[term["r"]] = co.gamma * fv ** 3
                out[term["h"]] = co.nu * fv ** 2
                cruise_of[term["flight"]] = cruise_of.get(
                    term["flight"], 0.0) + out.get(f, 0.0)
                key = f"{term['flight']}|{term['type']}"
                if f"wq[{key}]" in out:
                    out[f"wq[{key}]"] = math.sqrt(co.beta) / fv
                if f"wr[{key}]" in out:
                    out[f"wr[{key}]"] = math.sqrt(co.gamma) * fv ** 2
        for fid, fl in inst.flights.items():
            d_name, a_name = f"d[{fid}]", f"a[{fid}]"
            if d_name in out:
                out[a_name] = (out[d_name] + cruise_of.get(fid, 0.0)
                               + fl.non_cruise)
        for term in prepared.meta.get("penalty_terms", ()):
            fid = term["flight"]
            need = out[f"a[{fid}]"] - (inst.flights[fid].orig_arrival
                                       + grace)
            b = max(0.0, need)
            out[term["b"]] = b
            out[term["g"]] = b ** 1.5
            xb = f"xb[{fid}]"
            if xb in out:
                out[xb] = math.sqrt(b)
        for vid, val in out.items():
            if -1e-9 < val < 0.0:
                out[vid] = 0.0
        return Solution(model_kind=model.meta.get("kind", "?"),
                        variant=variant,
                        objective=prepared.objective.value(out),
                        values=out)

    def polish(values: Dict[str, float]) -> Optional[Solution]:
        fix = {vid: (round(values.get(vid, 0.0)), round(values.get(vid, 0.0)))
               for vid in binaries}
        res = cones.solve_relaxation(prepared, overrides=fix,
                                     options=polish_opts)
        if res.status != "optimal":
            return None
        return settle(res.values)

    def solve_node(node: _Node):
        return cones.solve_relaxation(prepared, overrides=node.fixings,
                                      options=relax_opts)

    pool = (ThreadPoolExecutor(max_workers=cfg.threads)
            if cfg.threads > 1 else None)
    try:
        while heap:
            if timed_out():
                status = "limit"
                break
            if should_stop is not None and should_stop():
                status = "cancelled"
                break
            if nodes_done >= cfg.max_nodes:
                status = "limit"
                break
            global_bound = max(n.bound for _, n in heap)
            if gap_met(global_bound):
                status = "optimal"
                break

            batch: List[_Node] = []
            take = cfg.threads if pool is not None else 1
            while heap and len(batch) < take:
                batch.append(heapq.heappop(heap)[1])
            if pool is not None:
                results = list(pool.map(solve_node, batch))
            else:
                results = [solve_node(nd) for nd in batch]

            for node, res in zip(batch, results):
                nodes_done += 1
                log.emit("node_open", node=node.order, depth=node.depth,
                         parent_bound=(None if node.bound == math.inf
                                       else node.bound))
                if res.status == "infeasible":
                    log.emit("node_close", node=node.order,
                             reason="infeasible")
                    if node.depth == 0:
                        root_infeasible = True
                    continue
                if res.status == "unbounded":
                    raise SolveError("relaxation unbounded; model is "
                                     "missing bounds")
                if res.status == "limit":
                    # unresolved bound: keep the parent's, split the node
                    branch_var = pick_branch(res.values) or next(
                        (v for v in binaries
                         if v not in node.fixings
                         or node.fixings[v][0] != node.fixings[v][1]), None)
                    if branch_var is None:
                        # fully fixed but unresolved: settle it by a long
                        # tight solve; an honest failure degrades the status
                        res2 = cones.solve_relaxation(
                            prepared, overrides=node.fixings,
                            options=IpmOptions(feastol=cfg.polish_feastol,
                                               gaptol=cfg.polish_gaptol,
                                               dres_tol=1e-7,
                                               max_iter=300))
                        if res2.status == "optimal":
                            cand = settle(res2.values)
                            if cand.objective > inc_obj:
                                inc_obj = cand.objective
                                incumbent = cand
                                log.emit("incumbent", value=inc_obj,
                                         node=node.order)
                        elif res2.status != "infeasible":
                            exactness_lost = True
                        log.emit("node_close", node=node.order,
                                 reason="stalled-integral")
                        continue
                    bound = node.bound
                else:
                    bound = min(res.objective, node.bound)
                    log.emit("bound", node=node.order, value=bound)
                    if inc_obj > -math.inf and \
                            bound - inc_obj <= cfg.rel_gap * \
                            max(abs(inc_obj), 1.0):
                        log.emit("node_close", node=node.order,
                                 reason="pruned")
                        continue
                    branch_var = pick_branch(res.values)

                if branch_var is None:
                    cand = polish(res.values)
                    if cand is None:
                        cand = settle(res.values)
                    if cand.objective > inc_obj:
                        inc_obj = cand.objective
                        incumbent = cand
                        log.emit("incumbent", value=inc_obj,
                                 node=node.order)
                    log.emit("node_close", node=node.order,
                             reason="integral")
                    continue

                # rounding heuristic on nearly integral relaxations
                nfrac = sum(1 for v in binaries
                            if cfg.int_tol < res.values.get(v, 0.0)
                            < 1.0 - cfg.int_tol)
                if nfrac <= 4:
                    fix = impl.propagate(
                        {v: (round(res.values.get(v, 0.0)),) * 2
                         for v in binaries})
                    if fix is not None:
                        cand = polish(res.values)
                        if cand is not None and cand.objective > inc_obj:
                            inc_obj = cand.objective
                            incumbent = cand
                            log.emit("incumbent", value=inc_obj,
                                     node=node.order, heuristic=True)

                for branch_dir in (1, 0):
                    counter += 1
                    fix = dict(node.fixings)
                    fix[branch_var] = (float(branch_dir), float(branch_dir))
                    fix = impl.propagate(fix)
                    if fix is None:
                        continue
                    child = _Node(bound=bound, order=counter,
                                  depth=node.depth + 1, fixings=fix)
                    heapq.heappush(heap, (child.key(cfg.node_order), child))
                log.emit("node_close", node=node.order, reason="branched",
                         variable=branch_var)
        else:
            status = "optimal"
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    if incumbent is not None:
        # one last, very tight continuous solve at the winning binaries so
        # every variant settles onto the same point of the same face
        fix = {vid: (incumbent.values.get(vid, 0.0),) * 2
               for vid in binaries}
        res = cones.solve_relaxation(
            prepared, overrides=fix,
            options=IpmOptions(feastol=1e-9, gaptol=1e-12, dres_tol=1e-6,
                               max_iter=300))
        if res.status == "optimal":
            cand = settle(res.values)
            if cand.objective > inc_obj:
                inc_obj = cand.objective
                incumbent = cand

    wall = time.monotonic() - t_start
    if exactness_lost and status == "optimal":
        status = "limit"
    open_bound = max((n.bound for _, n in heap), default=-math.inf)
    best_bound = max(open_bound, inc_obj)
    if incumbent is None:
        if status == "optimal" and (root_infeasible or not heap):
            status = "infeasible"
        stats = SolveStats(nodes=nodes_done, wall_time=wall,
                           rel_gap_pct=math.inf, incumbent=-math.inf,
                           best_bound=best_bound, status=status)
        log.emit("done", status=status)
        return None, stats
    stats = SolveStats(nodes=nodes_done, wall_time=wall,
                       rel_gap_pct=max(gap_pct(best_bound), 0.0),
                       incumbent=inc_obj, best_bound=best_bound,
                       status=status)
    incumbent.stats = stats
    log.emit("done", status=status, incumbent=inc_obj,
             bound=best_bound)
    incumbent.values = dict(incumbent.values)
    return incumbent, stats
