import json

import pytest

from fogsim.scenario import (EXPERIMENTS, ScenarioError, experiment, load_scenario, parse_scenario,
                             scenario_traces, ue_start_times)

MINIMAL = {
    "aps": [{"id": "ap_0", "location": [0, 0]}],
    "edcs": [{"id": "edc_0", "location": [0, 0]}],
    "apps": [{"id": "app"}],
    "ues": {"synthetic": {"n": 2, "area": [0, 0, 10, 10]}},
}


def test_bundled_toy_loads():
    s = load_scenario("sanfrancisco.toy")
    assert [a.id for a in s.aps] == ["ap_0", "ap_1"]
    assert s.edcs[0].pus == 4
    assert len(scenario_traces(s)) == 10
    assert s.end == 180.0


def test_strategy_typo_is_one_named_violation():
    doc = json.loads(json.dumps(MINIMAL))
    doc["edcs"][0]["dispatch"] = "minimun"
    with pytest.raises(ScenarioError) as info:
        parse_scenario(doc)
    assert len(info.value.violations) == 1
    assert "dispatch" in info.value.violations[0] and "minimun" in info.value.violations[0]


def test_negative_duration_names_field():
    with pytest.raises(ScenarioError) as info:
        parse_scenario({**MINIMAL, "duration": -1})
    assert any("duration" in v for v in info.value.violations)


def test_all_violations_reported_together():
    doc = json.loads(json.dumps(MINIMAL))
    doc["duration"] = 0
    doc["edcs"][0]["hardware"] = "sometimes"
    doc["aps"][0]["strategy"] = "greedy"
    doc["bogus"] = 1
    with pytest.raises(ScenarioError) as info:
        parse_scenario(doc)
    text = " | ".join(info.value.violations)
    for needle in ("duration", "hardware", "strategy", "bogus"):
        assert needle in text


def test_unresolved_table_reference():
    with pytest.raises(ScenarioError) as info:
        parse_scenario({**MINIMAL, "radio": {"dl_table": "nope"}})
    assert any("dl_table" in v for v in info.value.violations)


def test_missing_file_and_bad_syntax(tmp_path):
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "absent.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("duration = = 3\n")
    with pytest.raises(ScenarioError):
        load_scenario(bad)


def test_json_documents_accepted(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({**MINIMAL, "duration": 30}))
    assert load_scenario(path).duration == 30.0


def test_overrides_apply():
    s = load_scenario("sanfrancisco.toy", {"seed": 9, "duration": 10})
    assert (s.seed, s.duration) == (9, 10.0)


def test_experiment_presets():
    s = load_scenario("sanfrancisco.toy")
    two = experiment(s, "II")
    assert {(e.hardware, e.dispatch) for e in two.edcs} == {EXPERIMENTS["II"]}
    assert {(e.hardware, e.dispatch) for e in s.edcs} == {("always_on", "minimum")}


def test_start_times_seeded_within_spread():
    s = load_scenario("sanfrancisco.toy")
    ids = [f"ue_{i}" for i in range(10)]
    a, b = ue_start_times(s, ids), ue_start_times(s, ids)
    assert a == b
    assert all(0 <= t < 20.0 for t in a.values())
