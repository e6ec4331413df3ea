"""Solver-agnostic optimization model shared by formulations and the solver.

Holds variables (with role tags), linear rows, symbolic indicator
constraints awaiting linearization, hyperbolic rows u^2 <= v*w awaiting
second-order-cone rewriting, and a linear maximize objective with tagged
provenance.  Built single-threaded, sealed, then shared read-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

ROLES = ("d", "f", "a", "b", "z", "y", "s", "p", "q", "r", "h", "g", "v",
         "omega", "xaux")

LE, EQ, GE = "<=", "==", ">="

INF = float("inf")


class ModelError(ValueError):
    """Structural misuse of the model builder."""


@dataclass
class Variable:
    id: str
    lo: float
    hi: float
    role: str
    binary: bool = False

    def __post_init__(self):
        if self.role not in ROLES:
            raise ModelError(f"variable {self.id}: unknown role {self.role!r}")
        if self.lo > self.hi:
            raise ModelError(f"variable {self.id}: lo > hi")
        if self.binary and (self.lo < 0.0 or self.hi > 1.0):
            raise ModelError(f"variable {self.id}: binaries live in [0, 1]")


@dataclass
class LinearRow:
    name: str
    coeffs: Dict[str, float]
    sense: str
    rhs: float
    tag: str = ""

    def __post_init__(self):
        if self.sense not in (LE, EQ, GE):
            raise ModelError(f"row {self.name}: bad sense {self.sense!r}")
        if not any(c != 0.0 for c in self.coeffs.values()):
            raise ModelError(f"row {self.name}: no nonzero coefficient")


@dataclass
class IndicatorConstraint:
    """trigger == value  implies  target >= ready_const + sum(ready_terms).

    The trigger is a single binary or a sum of binaries whose value is
    guaranteed in {0, 1} by the model's own degree rows.
    """

    name: str
    trigger_vars: Tuple[str, ...]
    trigger_value: int
    target: str
    ready_terms: Dict[str, float]
    ready_const: float
    family: str = ""
    payload: Tuple[str, ...] = ()
    # Ready expression written over the ready flight's own assignment
    # variables (used by the McCormick route; equals ready_terms when the
    # stored form is already assignment-weighted).
    v_flight: str = ""
    v_terms: Optional[Dict[str, float]] = None
    v_const: Optional[float] = None

    def __post_init__(self):
        if not self.trigger_vars:
            raise ModelError(f"indicator {self.name}: empty trigger")
        if self.trigger_value not in (0, 1):
            raise ModelError(f"indicator {self.name}: trigger value not 0/1")

    def as_row(self) -> LinearRow:
        """The implied inequality, as enforced when the trigger fires."""
        coeffs = {self.target: 1.0}
        for v, c in self.ready_terms.items():
            coeffs[v] = coeffs.get(v, 0.0) - c
        return LinearRow(name=f"{self.name}.implied", coeffs=coeffs,
                         sense=GE, rhs=self.ready_const, tag="indicator")


Affine = Tuple[Dict[str, float], float]


@dataclass
class HyperbolicConstraint:
    """u^2 <= v * w with v, w affine and restricted nonnegative."""

    name: str
    u: Affine
    v: Affine
    w: Affine


@dataclass
class ObjectiveTerm:
    var: str
    coeff: float
    tag: str


@dataclass
class Objective:
    """Maximize constant + sum(coeff * var); every term carries a tag."""

    constant: float = 0.0
    terms: List[ObjectiveTerm] = field(default_factory=list)
    constant_tags: Dict[str, float] = field(default_factory=dict)

    def aggregate(self) -> Dict[str, float]:
        out: Dict[str, float] = {}
        for t in self.terms:
            out[t.var] = out.get(t.var, 0.0) + t.coeff
        return out

    def by_tag(self, values: Dict[str, float]) -> Dict[str, float]:
        """Evaluate the objective per provenance tag at a variable assignment."""
        out = dict(self.constant_tags)
        for t in self.terms:
            out[t.tag] = out.get(t.tag, 0.0) + t.coeff * values.get(t.var, 0.0)
        return out

    def value(self, values: Dict[str, float]) -> float:
        return self.constant + sum(t.coeff * values.get(t.var, 0.0)
                                   for t in self.terms)


class Model:
    def __init__(self, name: str = "model"):
        self.name = name
        self.variables: Dict[str, Variable] = {}
        self.rows: List[LinearRow] = []
        self.indicators: List[IndicatorConstraint] = []
        self.hyperbolics: List[HyperbolicConstraint] = []
        self.objective = Objective()
        self.meta: Dict[str, object] = {}
        self._sealed = False
        self._row_names: set = set()

    # -- construction ------------------------------------------------------

    def _check_open(self):
        if self._sealed:
            raise ModelError("model is sealed")

    def add_variable(self, vid: str, lo: float, hi: float, role: str,
                     binary: bool = False) -> str:
        self._check_open()
        if vid in self.variables:
            raise ModelError(f"duplicate variable id {vid}")
        self.variables[vid] = Variable(vid, lo, hi, role, binary)
        return vid

    def add_binary(self, vid: str, role: str) -> str:
        return self.add_variable(vid, 0.0, 1.0, role, binary=True)

    def add_row(self, name: str, coeffs: Dict[str, float], sense: str,
                rhs: float, tag: str = "") -> LinearRow:
        self._check_open()
        if name in self._row_names:
            raise ModelError(f"duplicate row name {name}")
        for v in coeffs:
            if v not in self.variables:
                raise ModelError(f"row {name}: unknown variable {v}")
        row = LinearRow(name, dict(coeffs), sense, rhs, tag)
        self.rows.append(row)
        self._row_names.add(name)
        return row

    def add_abs_le(self, name: str, x: Dict[str, float], x_const: float,
                   bound: Dict[str, float], bound_const: float, tag: str = ""):
        """|x| <= bound, stored as the two linear rows x <= bound and
        -x <= bound (affine arguments)."""
        plus = dict(x)
        for v, c in bound.items():
            plus[v] = plus.get(v, 0.0) - c
        self.add_row(f"{name}.pos", plus, LE, bound_const - x_const, tag)
        minus = {v: -c for v, c in x.items()}
        for v, c in bound.items():
            minus[v] = minus.get(v, 0.0) - c
        self.add_row(f"{name}.neg", minus, LE, bound_const + x_const, tag)

    def add_indicator(self, ind: IndicatorConstraint) -> IndicatorConstraint:
        self._check_open()
        for v in ind.trigger_vars:
            var = self.variables.get(v)
            if var is None:
                raise ModelError(f"indicator {ind.name}: unknown trigger {v}")
            if not var.binary:
                raise ModelError(
                    f"indicator {ind.name}: trigger {v} is not binary")
        if ind.target not in self.variables:
            raise ModelError(f"indicator {ind.name}: unknown target")
        for v in ind.ready_terms:
            if v not in self.variables:
                raise ModelError(f"indicator {ind.name}: unknown variable {v}")
        self.indicators.append(ind)
        return ind

    def add_hyperbolic(self, hyp: HyperbolicConstraint):
        self._check_open()
        for terms, _ in (hyp.u, hyp.v, hyp.w):
            for v in terms:
                if v not in self.variables:
                    raise ModelError(
                        f"hyperbolic {hyp.name}: unknown variable {v}")
        self.hyperbolics.append(hyp)

    def add_objective_term(self, vid: str, coeff: float, tag: str):
        self._check_open()
        if vid not in self.variables:
            raise ModelError(f"objective: unknown variable {vid}")
        self.objective.terms.append(ObjectiveTerm(vid, coeff, tag))

    def add_objective_constant(self, value: float, tag: str):
        self._check_open()
        self.objective.constant += value
        self.objective.constant_tags[tag] = (
            self.objective.constant_tags.get(tag, 0.0) + value)

    def seal(self):
        self.audit()
        self._sealed = True

    def clone(self) -> "Model":
        """Deep copy, unsealed, sharing nothing mutable with the original."""
        other = Model(self.name)
        other.variables = {k: Variable(v.id, v.lo, v.hi, v.role, v.binary)
                           for k, v in self.variables.items()}
        other.rows = [LinearRow(r.name, dict(r.coeffs), r.sense, r.rhs, r.tag)
                      for r in self.rows]
        other.indicators = [
            IndicatorConstraint(i.name, i.trigger_vars, i.trigger_value,
                                i.target, dict(i.ready_terms), i.ready_const,
                                i.family, i.payload, i.v_flight,
                                dict(i.v_terms) if i.v_terms else None,
                                i.v_const)
            for i in self.indicators]
        other.hyperbolics = [
            HyperbolicConstraint(h.name, (dict(h.u[0]), h.u[1]),
                                 (dict(h.v[0]), h.v[1]),
                                 (dict(h.w[0]), h.w[1]))
            for h in self.hyperbolics]
        other.objective = Objective(
            constant=self.objective.constant,
            terms=[ObjectiveTerm(t.var, t.coeff, t.tag)
                   for t in self.objective.terms],
            constant_tags=dict(self.objective.constant_tags))
        other.meta = dict(self.meta)
        other._row_names = set(self._row_names)
        return other

    # -- queries -----------------------------------------------------------

    def variables_by_role(self, role: str) -> List[Variable]:
        return [v for v in self.variables.values() if v.role == role]

    def binaries(self) -> List[Variable]:
        return [v for v in self.variables.values() if v.binary]

    def counts(self) -> Dict[str, int]:
        return {
            "variables": len(self.variables),
            "binaries": len(self.binaries()),
            "rows": len(self.rows),
            "indicators": len(self.indicators),
            "hyperbolics": len(self.hyperbolics),
        }

    def audit(self) -> None:
        """Raise if any emitted constraint references an orphan symbol."""
        orphans = []
        for row in self.rows:
            orphans.extend(v for v in row.coeffs if v not in self.variables)
        for ind in self.indicators:
            for v in (*ind.trigger_vars, ind.target, *ind.ready_terms):
                if v not in self.variables:
                    orphans.append(v)
        for hyp in self.hyperbolics:
            for terms, _ in (hyp.u, hyp.v, hyp.w):
                orphans.extend(v for v in terms if v not in self.variables)
        orphans.extend(t.var for t in self.objective.terms
                       if t.var not in self.variables)
        if orphans:
            raise ModelError(f"orphan symbols in model: {sorted(set(orphans))}")

    # -- debug dump ----------------------------------------------------------

    def dump_text(self) -> str:
        """One constraint per line, deterministic order, for diffing."""

        def aff(terms: Dict[str, float], const: float = 0.0) -> str:
            parts = [f"{c:+g}*{v}" for v, c in sorted(terms.items())]
            if const or not parts:
                parts.append(f"{const:+g}")
            return " ".join(parts)

        lines = [f"model {self.name}"]
        for v in sorted(self.variables.values(), key=lambda v: v.id):
            kind = "bin" if v.binary else "cont"
            lines.append(f"var {v.id} {kind} [{v.lo:g}, {v.hi:g}] role={v.role}")
        obj = self.objective
        lines.append(f"max {aff(obj.aggregate(), obj.constant)}")
        for row in self.rows:
            lines.append(f"row {row.name}: {aff(row.coeffs)} {row.sense} "
                         f"{row.rhs:g}")
        for ind in self.indicators:
            trig = "+".join(ind.trigger_vars)
            lines.append(
                f"ind {ind.name}: [{trig} == {ind.trigger_value}] -> "
                f"{ind.target} >= {aff(ind.ready_terms, ind.ready_const)}")
        for hyp in self.hyperbolics:
            lines.append(f"hyp {hyp.name}: ({aff(*hyp.u)})^2 <= "
                         f"({aff(*hyp.v)}) * ({aff(*hyp.w)})")
        return "\n".join(lines) + "\n"
