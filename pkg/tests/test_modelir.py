import pytest

from skedfit.modelir import (EQ, GE, INF, LE, HyperbolicConstraint,
                             IndicatorConstraint, Model, ModelError)


def small_model():
    m = Model("t")
    m.add_variable("d[a]", 0.0, 100.0, "d")
    m.add_variable("d[b]", 0.0, 100.0, "d")
    m.add_binary("y[a|b]", "y")
    return m


def test_empty_model_counts():
    m = Model("empty")
    assert m.counts() == {"variables": 0, "binaries": 0, "rows": 0,
                          "indicators": 0, "hyperbolics": 0}


def test_duplicate_variable_rejected():
    m = small_model()
    with pytest.raises(ModelError, match="duplicate"):
        m.add_variable("d[a]", 0.0, 1.0, "d")


def test_unknown_variable_in_row():
    m = small_model()
    with pytest.raises(ModelError, match="unknown"):
        m.add_row("r", {"nope": 1.0}, LE, 0.0)


def test_empty_trigger_rejected():
    with pytest.raises(ModelError, match="empty trigger"):
        IndicatorConstraint(name="i", trigger_vars=(), trigger_value=1,
                            target="d[a]", ready_terms={}, ready_const=0.0)


def test_indicator_trigger_must_be_binary():
    m = small_model()
    with pytest.raises(ModelError, match="not binary"):
        m.add_indicator(IndicatorConstraint(
            name="i", trigger_vars=("d[a]",), trigger_value=1,
            target="d[b]", ready_terms={"d[a]": 1.0}, ready_const=0.0))


def test_abs_value_stored_as_two_rows():
    m = small_model()
    m.add_abs_le("pair", {"d[a]": 1.0}, -1.0, {"y[a|b]": -1.0}, 1.0)
    names = [r.name for r in m.rows]
    assert names == ["pair.pos", "pair.neg"]
    # |d[a] - 1| <= 1 - y: at d[a]=2, y=0 both rows must hold with slack 0
    pos = m.rows[0]
    assert pos.coeffs["d[a]"] == 1.0 and pos.coeffs["y[a|b]"] == 1.0


def test_audit_catches_orphans():
    m = small_model()
    m.add_row("r", {"d[a]": 1.0}, LE, 5.0)
    m.rows[0].coeffs["ghost"] = 2.0  # corrupt behind the API
    with pytest.raises(ModelError, match="orphan"):
        m.audit()


def test_role_partition_total():
    m = small_model()
    with pytest.raises(ModelError, match="unknown role"):
        m.add_variable("x", 0.0, 1.0, "mystery")


def test_objective_terms_tagged_and_summed():
    m = small_model()
    m.add_objective_term("y[a|b]", 5.0, "revenue")
    m.add_objective_term("y[a|b]", -2.0, "spill")
    m.add_objective_constant(-7.0, "crew_service")
    assert m.objective.aggregate() == {"y[a|b]": 3.0}
    by_tag = m.objective.by_tag({"y[a|b]": 1.0})
    assert by_tag["revenue"] == 5.0
    assert by_tag["spill"] == -2.0
    assert m.objective.value({"y[a|b]": 1.0}) == -4.0


def test_sealed_model_rejects_changes():
    m = small_model()
    m.seal()
    with pytest.raises(ModelError, match="sealed"):
        m.add_variable("x", 0.0, 1.0, "d")


def test_clone_is_independent():
    m = small_model()
    m.add_row("r", {"d[a]": 1.0}, GE, 1.0)
    c = m.clone()
    c.add_row("r2", {"d[b]": 1.0}, LE, 2.0)
    assert len(m.rows) == 1 and len(c.rows) == 2


def test_dump_text_deterministic():
    m = small_model()
    m.add_row("r", {"d[a]": 1.0, "d[b]": -1.0}, EQ, 0.0)
    m.add_hyperbolic(HyperbolicConstraint(
        "h", u=({"d[a]": 1.0}, 0.0), v=({}, 1.0), w=({"d[b]": 1.0}, 0.0)))
    assert m.dump_text() == m.clone().dump_text()
    assert "row r:" in m.dump_text()
