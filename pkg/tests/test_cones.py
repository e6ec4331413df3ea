import math

import numpy as np
import pytest

from skedfit import cones
from skedfit.fuelburn import FuelCoeffs, fuel_burn
from skedfit.ipm import IpmOptions
from skedfit.modelir import INF, HyperbolicConstraint, Model

TIGHT = IpmOptions(feastol=1e-9, gaptol=1e-9, max_iter=140)


class TestHyperbolicToSoc:
    def test_boundary_point(self):
        # 2^2 = 1 * 4 sits exactly on the cone boundary
        t, u1, u2 = cones.hyperbolic_to_soc(
            ({"u": 1.0}, 0.0), ({"v": 1.0}, 0.0), ({"w": 1.0}, 0.0))
        vals = {"u": 2.0, "v": 1.0, "w": 4.0}

        def ev(aff):
            terms, const = aff
            return const + sum(c * vals[k] for k, c in terms.items())

        assert math.hypot(ev(u1), ev(u2)) == pytest.approx(ev(t))
        assert ev(t) == 5.0 and ev(u2) == -3.0

    def test_infeasible_point_violates(self):
        t, u1, u2 = cones.hyperbolic_to_soc(
            ({"u": 1.0}, 0.0), ({"v": 1.0}, 0.0), ({"w": 1.0}, 0.0))
        vals = {"u": 3.0, "v": 1.0, "w": 4.0}

        def ev(aff):
            terms, const = aff
            return const + sum(c * vals[k] for k, c in terms.items())

        assert math.hypot(ev(u1), ev(u2)) > ev(t)  # 9 > 4

    def test_zero_u_feasible_for_nonneg_factors(self):
        t, u1, u2 = cones.hyperbolic_to_soc(({}, 0.0), ({}, 1.0), ({}, 4.0))
        assert math.hypot(u1[1], u2[1]) <= t[1]


def penalty_model():
    m = Model("pen")
    m.add_variable("b[x]", 0.0, INF, "b")
    m.add_variable("g[x]", 0.0, INF, "g")
    m.meta["penalty_terms"] = [{"flight": "x", "b": "b[x]", "g": "g[x]"}]
    m.meta["fuel_terms"] = []
    m.add_objective_term("g[x]", -1.0, "tardiness")
    return cones.emit_penalty_epigraph(m)


@pytest.mark.parametrize("b0", [0.0, 1.0, 4.0, 22.0, 100.0])
def test_penalty_epigraph_minimal_g(b0):
    model = penalty_model()
    res = cones.solve_relaxation(model, overrides={"b[x]": (b0, b0)},
                                 options=TIGHT)
    assert res.status == "optimal"
    want = b0 ** 1.5
    assert -res.objective == pytest.approx(want, rel=1e-6, abs=1e-6)


def fuel_model(co: FuelCoeffs, variant: str, bounds=(85.0, 200.0)):
    m = Model("fuel")
    m.add_variable("f[i|T]", 0.0, bounds[1], "f")
    m.add_binary("z[i|T]", "z")
    for k in ("p", "q", "r", "h"):
        m.add_variable(f"{k}[i|T]", 0.0, INF, k)
        m.add_objective_term(f"{k}[i|T]", -1.0, "fuel_increment")
    m.meta["fuel_terms"] = [{
        "flight": "i", "type": "T", "f": "f[i|T]", "z": "z[i|T]",
        "p": "p[i|T]", "q": "q[i|T]", "r": "r[i|T]", "h": "h[i|T]",
        "coeffs": co, "bounds": bounds}]
    m.meta["penalty_terms"] = []
    m.add_row("gate_lo", {"f[i|T]": 1.0, "z[i|T]": -bounds[0]}, ">=", 0.0)
    m.add_row("gate_hi", {"f[i|T]": 1.0, "z[i|T]": -bounds[1]}, "<=", 0.0)
    return cones.emit_fuel_epigraph(m, variant)


CO = FuelCoeffs(alpha=2.0e6, beta=2.0e4, gamma=1e-4, nu=1e-2)


class TestFuelEpigraph:
    @pytest.mark.parametrize("variant", ["micq1", "micq2"])
    def test_tight_at_assignment_on(self, variant):
        for f0 in (90.0, 120.0, 160.0, 199.0):
            model = fuel_model(CO, variant)
            res = cones.solve_relaxation(
                model, overrides={"z[i|T]": (1.0, 1.0),
                                  "f[i|T]": (f0, f0)}, options=TIGHT)
            assert res.status == "optimal"
            assert -res.objective == pytest.approx(fuel_burn(CO, f0),
                                                   rel=1e-6)

    def test_off_assignment_costs_nothing(self):
        model = fuel_model(CO, "micq2")
        res = cones.solve_relaxation(model,
                                     overrides={"z[i|T]": (0.0, 0.0)},
                                     options=TIGHT)
        assert res.status == "optimal"
        assert abs(res.objective) <= 1e-9
        assert res.values["f[i|T]"] == 0.0

    def test_fractional_relaxation_ordering(self):
        over = {"z[i|T]": (0.5, 0.5), "f[i|T]": (100.0, 100.0)}
        weak = cones.solve_relaxation(fuel_model(CO, "micq1"),
                                      overrides=over, options=TIGHT)
        strong = cones.solve_relaxation(fuel_model(CO, "micq2"),
                                        overrides=over, options=TIGHT)
        # hull variant cannot relax below the plain one (cost side)
        assert -strong.objective >= -weak.objective - 1e-6
        # the beta chain: z^3/f^2 vs z^4/f^2 at z = 1/2 differ by 2x
        q2 = strong.values["q[i|T]"]
        q1 = weak.values["q[i|T]"]
        assert q2 == pytest.approx(CO.beta * 0.5 ** 3 / 100.0 ** 2,
                                   rel=1e-4)
        assert q1 == pytest.approx(CO.beta * 0.5 ** 4 / 100.0 ** 2,
                                   rel=1e-4)

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            cones.emit_fuel_epigraph(Model("x"), "micq3")


class TestConversion:
    def test_presolve_detects_crossed_bounds(self):
        model = fuel_model(CO, "micq2")
        with pytest.raises(cones.PresolveInfeasible):
            cones.to_cone_program(model,
                                  overrides={"f[i|T]": (300.0, 300.0),
                                             "z[i|T]": (1.0, 1.0)})

    def test_presolve_drops_off_epigraphs(self):
        model = fuel_model(CO, "micq2")
        conv = cones.to_cone_program(model,
                                     overrides={"z[i|T]": (0.0, 0.0)})
        assert conv.program.n == 0  # everything fixed away

    def test_row_violation_after_fixing(self):
        m = Model("t")
        m.add_variable("x", 0.0, 10.0, "d")
        m.add_row("r", {"x": 1.0}, ">=", 5.0)
        m.meta["fuel_terms"] = []
        m.meta["penalty_terms"] = []
        with pytest.raises(cones.PresolveInfeasible):
            cones.to_cone_program(m, overrides={"x": (1.0, 1.0)})

    def test_indicator_models_rejected(self, two_route):
        from skedfit.formulations import build_ctc
        with pytest.raises(Exception, match="linearize"):
            cones.to_cone_program(build_ctc(two_route))

    def test_objective_offset_roundtrip(self):
        m = Model("t")
        m.add_variable("x", 2.0, 10.0, "d")
        m.add_objective_term("x", 3.0, "revenue")
        m.add_objective_constant(7.0, "crew_service")
        m.meta["fuel_terms"] = []
        m.meta["penalty_terms"] = []
        m.add_row("r", {"x": 1.0}, "<=", 4.0)
        res = cones.solve_relaxation(m, options=TIGHT)
        # max 3x + 7 with x in [2, 4]
        assert res.objective == pytest.approx(19.0, rel=1e-7)
        assert res.values["x"] == pytest.approx(4.0, abs=1e-5)
