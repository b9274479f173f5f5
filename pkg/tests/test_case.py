import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import CASES, bundled
from gridsched.case import (CaseError, ScenarioSet, dump_case, load_case, parse_case,
                            read_scenario_csv, save_case, scenario_csv, validate_case)

RADIAL = """
format_version: 1
horizon: 2
reference_bus: 1
buses:
  - {id: 1, demand: [0, 0]}
  - {id: 2, demand: [10, 20]}
lines:
  - {id: 1, from: 1, to: 2, b: 5.0, limit: 50.0, emergency: 60.0}
generators:
  - {id: 1, bus: 1, pmin: 0, pmax: 40, cost: 10, no_load: 1, startup: 5,
     ramp_hr: 40, ramp_10: 10, ramp_su: 40, ramp_sd: 40}
scenarios:
  probabilities: [1.0]
"""


def test_rts24_inventory(rts24):
    assert len(rts24.buses) == 24
    assert len(rts24.lines) == 38
    assert len(rts24.generators) == 33
    assert sorted(e.bus for e in rts24.ess_units) == [14, 23]
    assert sorted(r.bus for r in rts24.res_units) == [16, 21]
    assert rts24.scenarios.count == 4
    assert rts24.horizon == 24


def test_rts24_totals(rts24):
    rep = validate_case(rts24)
    assert rep.ok, rep.render()
    assert rep.totals["conventional_capacity_mw"] == pytest.approx(3393.0)
    assert rep.totals["peak_load_mw"] == pytest.approx(2270.0)


def test_fig1_structure(fig1):
    assert [b.id for b in fig1.buses] == [1, 2, 3, 4]
    assert [(l.id, l.from_bus, l.to_bus) for l in fig1.lines] == [
        (1, 1, 2), (2, 1, 3), (3, 1, 4), (4, 3, 4), (5, 2, 4)]
    assert not fig1.line(4).switchable


def test_defaults_from_minimal_file():
    case = load_case(RADIAL)
    g = case.generator(1)
    assert g.min_up == 1 and g.min_down == 1
    assert case.period_length == 1.0 and case.base_mva == 100.0
    assert case.options.contingency_limit == "emergency"


def mutate(text, old, new):
    assert old in text
    return text.replace(old, new)


@pytest.mark.parametrize("old,new,message", [
    ("probabilities: [1.0]", "probabilities: [0.5, 0.4]", "probabilities sum"),
    ("from: 1, to: 2", "from: 2, to: 2", "from and to bus"),
    ("from: 1, to: 2", "from: 1, to: 9", "dangling"),
    ("bus: 1, pmin", "bus: 7, pmin", "dangling"),
    ("reference_bus: 1", "reference_bus: 5", "reference bus"),
    ("emergency: 60.0", "emergency: 40.0", "emergency limit"),
    ("demand: [10, 20]", "demand: [10, -1]", "negative demand"),
])
def test_semantic_defects(old, new, message):
    with pytest.raises(CaseError) as err:
        load_case(mutate(RADIAL, old, new))
    assert any(message in e for e in err.value.errors), err.value.errors


def test_soc_bounds_inverted():
    text = RADIAL + """ess:
  - {id: 1, bus: 2, p_charge: 5, p_discharge: 5, ramp_charge: 5, ramp_discharge: 5,
     soc_min: 0.9, soc_max: 0.2, energy: 10, eff_charge: 0.9, eff_discharge: 0.9, init_energy: 5}
"""
    rep = validate_case(parse_case(text))
    assert "ess 1: soc bounds inverted" in rep.errors


def test_disconnected_graph():
    text = mutate(RADIAL, "  - {id: 2, demand: [10, 20]}",
                  "  - {id: 2, demand: [10, 20]}\n  - {id: 3, demand: [0, 0]}")
    with pytest.raises(CaseError, match="disconnected"):
        load_case(text)


def test_all_errors_collected():
    text = mutate(mutate(RADIAL, "probabilities: [1.0]", "probabilities: [0.3]"),
                  "from: 1, to: 2", "from: 2, to: 2")
    with pytest.raises(CaseError) as err:
        load_case(text)
    assert len(err.value.errors) >= 2


def test_parse_errors():
    with pytest.raises(CaseError, match="parse error"):
        load_case("buses: [")
    with pytest.raises(CaseError, match="format_version"):
        load_case(RADIAL.replace("format_version: 1", "format_version: 2"))
    with pytest.raises(CaseError, match="unknown key"):
        load_case(RADIAL + "options: {colour: red}\n")


@pytest.mark.parametrize("name", ["fig1", "sixbus", "rts24"])
def test_dump_load_round_trip(name):
    case = bundled(name)
    back = load_case(dump_case(case, embed_scenarios=True))
    assert back.fingerprint() == case.fingerprint()
    assert back.lines == case.lines and back.generators == case.generators
    assert back.scenarios == case.scenarios


def test_save_writes_csv_sidecar(tmp_path, rts24):
    path = tmp_path / "copy.case"
    save_case(rts24, path)
    assert (tmp_path / rts24.scenario_csv).exists()
    assert load_case(path).fingerprint() == rts24.fingerprint()


def test_bundled_csv_header():
    text = (CASES / "rts24_scenarios.csv").read_text()
    assert text.splitlines()[0] == "scenario,unit,period,capacity_mw"
    assert len(read_scenario_csv(text)) == 4 * 2 * 24


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 1e4, allow_nan=False), min_size=6, max_size=6))
def test_scenario_csv_round_trip(values):
    scen = ScenarioSet(np.array([0.5, 0.5]), (3,), np.array(values).reshape(2, 1, 3))
    rows = read_scenario_csv(scenario_csv(scen))
    assert [v for *_, v in rows] == values


def test_restricted_renormalizes(sixbus):
    small = sixbus.restricted(horizon=2, scenarios=[1])
    assert small.horizon == 2 and small.scenarios.count == 1
    assert small.scenarios.probabilities.tolist() == [1.0]
    assert all(len(b.demand) == 2 for b in small.buses)
    assert validate_case(small).ok
    with pytest.raises(ValueError):
        sixbus.restricted(horizon=0)


def test_case_is_not_mutated_by_replace(fig1):
    other = dataclasses.replace(fig1, name="other")
    assert fig1.name == "fig1" and other.lines is fig1.lines
