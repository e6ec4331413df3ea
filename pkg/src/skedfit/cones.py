"""Conic content: fuel/penalty epigraphs, SOC rewriting, model conversion.

The fuel cost alpha/f + beta/f^2 + gamma f^3 + nu f^2 gated by a binary z is
carried by epigraph variables (p, q, r, h); two strengths are offered:

    micq2 (hull):   alpha z^2 <= p f;  beta z^4 <= f^2 q z;
                    gamma f^4 <= z^2 r f;  nu f^2 <= h z
    micq1 (plain):  alpha z^2 <= p f;  beta z^4 <= f^2 q;
                    gamma f^4 <= r f;  nu f^2 <= h

The epigraph variables are denominated in kg (coefficients folded in), so
every column the solver sees has comparable magnitude; this is the same
relaxation up to positive rescaling of (p, q, r, h).  Degree-4 relations
decompose into hyperbolic triples via one nonnegative auxiliary each:
beta z^4 <= f^2 q z  becomes  w^2 <= q z  and  sqrt(beta) z^2 <= f w
(eliminating w recovers the quartic; at z = 1 the chain is tight, which the
tightness tests assert).  The tardiness epigraph b^1.5 <= g becomes
b^2 <= x g, x^2 <= b.  Every hyperbolic u^2 <= v w turns into the SOC row
||(2u, v - w)|| <= v + w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from .ipm import ConeProgram, IpmOptions, SocpResult, solve_socp
from .modelir import (EQ, GE, INF, LE, HyperbolicConstraint, Model,
                      ModelError)

CONIC_VARIANTS = ("micq1", "micq2")


class PresolveInfeasible(Exception):
    """A node's bound fixings already contradict the rows."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def _aff(terms: Dict[str, float], const: float = 0.0):
    return (dict(terms), const)


def emit_fuel_epigraph(model: Model, variant: str) -> Model:
    """Attach the per-(flight, type) fuel epigraph chains for a variant."""
    if variant not in CONIC_VARIANTS:
        raise ValueError(f"unknown conic variant {variant!r}")
    out = model.clone()
    strong = variant == "micq2"
    for term in out.meta.get("fuel_terms", ()):
        f = term["f"]
        z = term["z"]  # None means the assignment is fixed on
        p, q, r, h = term["p"], term["q"], term["r"], term["h"]
        co = term["coeffs"]
        fid, t = term["flight"], term["type"]
        key = f"{fid}|{t}"
        one = _aff({}, 1.0)

        def za(scale=1.0):
            if z is not None:
                return _aff({z: scale})
            return _aff({}, scale)

        def fa(scale=1.0):
            return _aff({f: scale})

        wq = f"wq[{key}]"
        wr = f"wr[{key}]"
        out.add_variable(wq, 0.0, INF, "xaux")
        out.add_variable(wr, 0.0, INF, "xaux")
        out.add_hyperbolic(HyperbolicConstraint(
            f"fuel_p[{key}]", u=za(math.sqrt(co.alpha)), v=_aff({p: 1.0}),
            w=fa()))
        out.add_hyperbolic(HyperbolicConstraint(
            f"fuel_q_a[{key}]", u=_aff({wq: 1.0}), v=_aff({q: 1.0}),
            w=za() if strong else one))
        out.add_hyperbolic(HyperbolicConstraint(
            f"fuel_q_b[{key}]", u=za(co.beta ** 0.25), v=fa(),
            w=_aff({wq: 1.0})))
        out.add_hyperbolic(HyperbolicConstraint(
            f"fuel_r_a[{key}]", u=_aff({wr: 1.0}), v=_aff({r: 1.0}),
            w=fa()))
        out.add_hyperbolic(HyperbolicConstraint(
            f"fuel_r_b[{key}]", u=fa(co.gamma ** 0.25),
            v=za() if strong else one, w=_aff({wr: 1.0})))
        out.add_hyperbolic(HyperbolicConstraint(
            f"fuel_h[{key}]", u=fa(math.sqrt(co.nu)), v=_aff({h: 1.0}),
            w=za() if strong else one))
    out.meta["conic"] = variant
    return out


def emit_penalty_epigraph(model: Model) -> Model:
    """Attach tardiness epigraph chains b^1.5 <= g."""
    out = model.clone()
    for term in out.meta.get("penalty_terms", ()):
        b, g, fid = term["b"], term["g"], term["flight"]
        x = f"xb[{fid}]"
        out.add_variable(x, 0.0, INF, "xaux")
        out.add_hyperbolic(HyperbolicConstraint(
            f"pen_a[{fid}]", u=_aff({b: 1.0}), v=_aff({x: 1.0}),
            w=_aff({g: 1.0})))
        out.add_hyperbolic(HyperbolicConstraint(
            f"pen_b[{fid}]", u=_aff({x: 1.0}), v=_aff({b: 1.0}),
            w=_aff({}, 1.0)))
    return out


def hyperbolic_to_soc(u, v, w):
    """u^2 <= v*w (v, w >= 0) as the cone triple (t, u1, u2):
    t = v + w, u1 = 2u, u2 = v - w, with ||(u1, u2)|| <= t."""
    ut, uc = u
    vt, vc = v
    wt, wc = w
    t_terms = dict(vt)
    for k, c in wt.items():
        t_terms[k] = t_terms.get(k, 0.0) + c
    d_terms = dict(vt)
    for k, c in wt.items():
        d_terms[k] = d_terms.get(k, 0.0) - c
    return ((t_terms, vc + wc),
            ({k: 2.0 * c for k, c in ut.items()}, 2.0 * uc),
            (d_terms, vc - wc))


@dataclass
class Conversion:
    program: ConeProgram
    columns: Dict[str, Tuple[int, float]]   # var -> (col, shift)
    fixed: Dict[str, float]
    obj_offset: float                        # model objective constant part
    obj_sign_flip: float = -1.0              # cone minimizes -profit

    def model_objective(self, cone_obj: float) -> float:
        return self.obj_offset - cone_obj

    def extract(self, x: np.ndarray) -> Dict[str, float]:
        values = dict(self.fixed)
        for var, (col, shift) in self.columns.items():
            values[var] = shift + x[col]
        return values


def _presolve(model: Model, overrides) -> Tuple[Dict[str, Tuple[float, float]],
                                                Dict[str, float]]:
    """Effective bounds after overrides plus fixing driven by off binaries."""
    bounds: Dict[str, Tuple[float, float]] = {}
    for v in model.variables.values():
        lo, hi = v.lo, v.hi
        if overrides and v.id in overrides:
            olo, ohi = overrides[v.id]
            lo, hi = max(lo, olo), min(hi, ohi)
        if lo > hi + 1e-12:
            raise PresolveInfeasible(f"bounds cross for {v.id}")
        bounds[v.id] = (lo, max(lo, hi))
    # gate cruise variables by fixed assignment binaries
    for term in model.meta.get("fuel_terms", ()):
        z = term["z"]
        if z is None:
            continue
        zlo, zhi = bounds[z]
        cl, cu = term["bounds"]
        f = term["f"]
        flo, fhi = bounds[f]
        if zhi <= 0.0:
            bounds[f] = (0.0, 0.0)
            for aux in ("p", "q", "r", "h"):
                bounds[term[aux]] = (0.0, 0.0)
        elif zlo >= 1.0:
            nlo, nhi = max(flo, cl), min(fhi, cu)
            if nlo > nhi + 1e-12:
                raise PresolveInfeasible(f"cruise bounds cross for {f}")
            bounds[f] = (nlo, nhi)
    fixed = {v: lo for v, (lo, hi) in bounds.items() if hi - lo <= 1e-12}
    return bounds, fixed


def to_cone_program(model: Model,
                    overrides: Optional[Dict[str, Tuple[float, float]]] = None,
                    presolve: bool = True) -> Conversion:
    """Lower a sealed, indicator-free model to standard conic form."""
    if model.indicators:
        raise ModelError("model still has symbolic indicators; linearize "
                         "before conversion")
    if presolve:
        bounds, fixed = _presolve(model, overrides)
    else:
        bounds = {v.id: (v.lo, v.hi) for v in model.variables.values()}
        if overrides:
            for vid, (lo, hi) in overrides.items():
                blo, bhi = bounds[vid]
                bounds[vid] = (max(blo, lo), min(bhi, hi))
        fixed = {v: lo for v, (lo, hi) in bounds.items() if hi - lo <= 1e-12}

    dropped_epi = set()
    for term in model.meta.get("fuel_terms", ()):
        z = term["z"]
        if z is not None and fixed.get(z, 1.0) == 0.0 and presolve:
            key = f"{term['flight']}|{term['type']}"
            for name in (f"fuel_p[{key}]", f"fuel_q_a[{key}]",
                         f"fuel_q_b[{key}]", f"fuel_r_a[{key}]",
                         f"fuel_r_b[{key}]", f"fuel_h[{key}]"):
                dropped_epi.add(name)
            for aux in (f"wq[{key}]", f"wr[{key}]"):
                if aux in model.variables:
                    fixed.setdefault(aux, 0.0)

    free_cols: List[str] = []
    nonneg_cols: List[Tuple[str, float]] = []  # (var, shift)
    upper_rows: List[Tuple[str, float]] = []   # var + slack = hi - lo
    for vid, (lo, hi) in bounds.items():
        if vid in fixed:
            continue
        if lo == -INF:
            free_cols.append(vid)
        else:
            nonneg_cols.append((vid, lo))
        if hi < INF:
            upper_rows.append((vid, hi - (lo if lo != -INF else 0.0)))

    # column layout: free | shifted-nonneg | slacks | cone blocks
    col: Dict[str, int] = {}
    shifts: Dict[str, float] = {}
    idx = 0
    for vid in free_cols:
        col[vid] = idx
        shifts[vid] = 0.0
        idx += 1
    n_free = idx
    for vid, lo in nonneg_cols:
        col[vid] = idx
        shifts[vid] = lo
        idx += 1

    rows_a: List[Tuple[int, int, float]] = []
    rhs: List[float] = []
    row_idx = 0
    slack_count = 0
    slack_specs: List[Tuple[int, int]] = []  # (row, sign) resolved later

    def sub_terms(terms: Dict[str, float]):
        """Split into live (col, coef after shift) plus constant part."""
        const = 0.0
        live = []
        for v, cval in terms.items():
            if v in fixed:
                const += cval * fixed[v]
            else:
                const += cval * shifts[v]
                live.append((col[v], cval))
        return live, const

    pending_rows = []
    for row in model.rows:
        live, const = sub_terms(row.coeffs)
        target = row.rhs - const
        if not live:
            ok = {LE: const <= row.rhs + 1e-9,
                  GE: const >= row.rhs - 1e-9,
                  EQ: abs(const - row.rhs) <= 1e-9}[row.sense]
            if not ok:
                raise PresolveInfeasible(f"row {row.name} violated after "
                                         f"fixing")
            continue
        pending_rows.append((live, row.sense, target))
    for vid, span in upper_rows:
        pending_rows.append(([(col[vid], 1.0)], LE, span))

    cone_sizes: List[int] = []
    cone_links = []
    for hyp in model.hyperbolics:
        if hyp.name in dropped_epi:
            continue
        t_aff, u1_aff, u2_aff = hyperbolic_to_soc(hyp.u, hyp.v, hyp.w)
        parts = []
        all_const = True
        for aff in (t_aff, u1_aff, u2_aff):
            live, const = sub_terms(aff[0])
            const += aff[1]
            parts.append((live, const))
            if live:
                all_const = False
        if all_const:
            tval, u1val, u2val = (p[1] for p in parts)
            if math.hypot(u1val, u2val) > tval + 1e-9:
                raise PresolveInfeasible(f"cone row {hyp.name} violated "
                                         f"after fixing")
            continue
        cone_links.append(parts)

    n_nonneg_vars = idx - n_free
    # slack columns follow
    for live, sense, target in pending_rows:
        for cidx, cval in live:
            rows_a.append((row_idx, cidx, cval))
        if sense in (LE, GE):
            slack_specs.append((row_idx, 1.0 if sense == LE else -1.0))
        rhs.append(target)
        row_idx += 1
    n_slack = len(slack_specs)
    slack_base = idx
    for k, (r, sign) in enumerate(slack_specs):
        rows_a.append((r, slack_base + k, sign))
    idx += n_slack

    cone_base = idx
    for parts in cone_links:
        size = 3
        cone_sizes.append(size)
        for j, (live, const) in enumerate(parts):
            cvar = cone_base + j
            rows_a.append((row_idx, cvar, 1.0))
            for cidx, cval in live:
                rows_a.append((row_idx, cidx, -cval))
            rhs.append(const)
            row_idx += 1
        cone_base += size
    idx = cone_base

    # objective
    c_vec = np.zeros(idx)
    obj_const = model.objective.constant
    for vid, coeff in model.objective.aggregate().items():
        if vid in fixed:
            obj_const += coeff * fixed[vid]
        else:
            obj_const += coeff * shifts[vid]
            c_vec[col[vid]] += -coeff  # cone program minimizes -profit

    if rows_a:
        data = [v for (_, _, v) in rows_a]
        ii = [r for (r, _, _) in rows_a]
        jj = [c for (_, c, _) in rows_a]
        A = sp.csr_matrix(sp.coo_matrix((data, (ii, jj)),
                                        shape=(row_idx, idx)))
    else:
        A = sp.csr_matrix((0, idx))
    program = ConeProgram(c=c_vec, A=A, b=np.array(rhs, dtype=float),
                          n_free=n_free,
                          n_nonneg=n_nonneg_vars + n_slack,
                          cones=cone_sizes)
    columns = {vid: (cidx, shifts[vid]) for vid, cidx in col.items()}
    return Conversion(program=program, columns=columns, fixed=fixed,
                      obj_offset=obj_const)


@dataclass
class RelaxationResult:
    status: str            # optimal | infeasible | unbounded | limit
    objective: float       # model scale (maximized profit), nan if not solved
    values: Dict[str, float]
    socp: Optional[SocpResult] = None


def solve_relaxation(model: Model,
                     overrides: Optional[Dict[str, Tuple[float, float]]] = None,
                     options: Optional[IpmOptions] = None) -> RelaxationResult:
    """Continuous solve of a linearized model under bound overrides."""
    try:
        conv = to_cone_program(model, overrides)
    except PresolveInfeasible:
        return RelaxationResult("infeasible", float("nan"), {})
    res = solve_socp(conv.program, options)
    if res.status == "optimal":
        return RelaxationResult("optimal",
                                conv.model_objective(res.pobj),
                                conv.extract(res.x), res)
    if res.status == "primal-infeasible":
        return RelaxationResult("infeasible", float("nan"), {}, res)
    if res.status == "dual-infeasible":
        return RelaxationResult("unbounded", float("inf"), {}, res)
    return RelaxationResult("limit", conv.model_objective(res.pobj),
                            conv.extract(res.x), res)
