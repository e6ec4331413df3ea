import pytest

from skedfit import bnb, fixtures, verify
from skedfit.formulations import build_ctc, build_ctcas, vn_b, vn_d, vn_s


@pytest.fixture(scope="module")
def solved(two_route_mod):
    inst = two_route_mod
    ctc, _ = bnb.solve(build_ctc(inst), "micq2+mc")
    ctcas, _ = bnb.solve(build_ctcas(inst), "micq2+mc")
    return inst, ctc, ctcas


@pytest.fixture(scope="module")
def two_route_mod():
    return fixtures.two_route_instance()


def test_clean_solutions_pass(solved):
    inst, ctc, ctcas = solved
    assert verify.verify_ctc_solution(inst, ctc).ok
    assert verify.verify_ctcas_solution(inst, ctcas).ok


def test_breakdown_keys(solved):
    inst, ctc, _ = solved
    rep = verify.verify_ctc_solution(inst, ctc)
    assert set(rep.breakdown) == {
        "revenue", "fuel_emission_increment", "spilled_cost",
        "deviation_penalty", "swap_cost", "crew_service_cost", "profit"}


def test_planted_timing_violation(solved):
    inst, ctc, _ = solved
    values = dict(ctc.values)
    # find the active handoff and make the new flight leave too early
    host = next(k for k, v in values.items()
                if k.startswith("y[") and v > 0.5 and "|1842]" in k)
    values[vn_d("1842")] = values["a[" + host.split("[")[1]
                                  .split("|")[0] + "]"] - 60.0
    bad = type(ctc)(model_kind="ctc", variant=ctc.variant,
                    objective=ctc.objective, values=values)
    rep = verify.verify_ctc_solution(inst, bad)
    assert not rep.ok
    assert any("handoff_to_new" in v.constraint or
               "arrival_def" in v.constraint for v in rep.violations)


def test_planted_asymmetric_swap(solved):
    inst, _, ctcas = solved
    values = dict(ctcas.values)
    values[vn_s("451", "623")] = 1.0
    values[vn_s("623", "451")] = 0.0
    bad = type(ctcas)(model_kind="ctcas", variant=ctcas.variant,
                      objective=ctcas.objective, values=values)
    rep = verify.verify_ctcas_solution(inst, bad)
    assert not rep.ok
    assert any("swap_symmetry" in v.constraint for v in rep.violations)


def test_planted_route_cap_violation(solved):
    inst, _, ctcas = solved
    values = dict(ctcas.values)
    for pair in (("451", "623"), ("1586", "527")):
        values[vn_s(*pair)] = 1.0
        values[vn_s(*pair[::-1])] = 1.0
    bad = type(ctcas)(model_kind="ctcas", variant=ctcas.variant,
                      objective=ctcas.objective, values=values)
    rep = verify.verify_ctcas_solution(inst, bad)
    assert not rep.ok
    assert any("route_swap_cap" in v.constraint for v in rep.violations)


def test_objective_corruption_flagged(solved):
    inst, ctc, _ = solved
    bad = type(ctc)(model_kind="ctc", variant=ctc.variant,
                    objective=ctc.objective + 500.0, values=ctc.values)
    rep = verify.verify_ctc_solution(inst, bad)
    assert not rep.ok
    assert any(v.constraint == "objective" for v in rep.violations)


def test_missing_values_error(solved):
    inst, ctc, _ = solved
    values = {k: v for k, v in ctc.values.items() if k != vn_d("633")}
    bad = type(ctc)(model_kind="ctc", variant=ctc.variant,
                    objective=ctc.objective, values=values)
    with pytest.raises(ValueError, match="missing"):
        verify.verify_ctc_solution(inst, bad)


def test_negative_tardiness_flagged(solved):
    inst, ctc, _ = solved
    values = dict(ctc.values)
    values[vn_b("451")] = -5.0
    bad = type(ctc)(model_kind="ctc", variant=ctc.variant,
                    objective=ctc.objective, values=values)
    rep = verify.verify_ctc_solution(inst, bad)
    assert not rep.ok


def test_spill_recount(solved):
    inst, _, ctcas = solved
    rep = verify.verify_ctcas_solution(inst, ctcas)
    assert rep.spilled == {"451": 10.0, "584": 6.0, "1842": 3.0}
    assert rep.breakdown["spilled_cost"] == pytest.approx(19 * 105.63)
