import math

import pytest
from hypothesis import given, settings, strategies as st

from fogsim.devs import INFINITY, Atomic, ConfigurationError, Coordinator, Coupled, Port, \
    SimulationFault, simulate

from toymodels import Collector, Counter, Generator, pipeline

PIPELINE_CALENDAR = [
    (1.0, "top.gen.out", "gen#1"),
    (2.0, "top.gen.out", "gen#2"),
    (2.5, "top.proc.out", "gen#1"),
    (3.0, "top.gen.out", "gen#3"),
    (4.0, "top.proc.out", "gen#2"),
    (5.5, "top.proc.out", "gen#3"),
]


def test_pipeline_log_matches_hand_calendar():
    root, *_ = pipeline()
    log = simulate(root, until=10)
    assert [(r.time, r.port, r.value) for r in log] == PIPELINE_CALENDAR


def test_generator_feeds_counter_until_cutoff():
    root = Coupled("top")
    gen = root.add_component(Generator("gen", 1.0))
    sink = root.add_component(Collector("sink"))
    root.add_coupling(gen.out, sink.inp)
    simulate(root, until=3.5)
    assert [t for t, _ in sink.seen] == [1.0, 2.0, 3.0]


def test_empty_root_terminates():
    assert len(simulate(Coupled("empty"), until=100)) == 0
    assert len(simulate(Coupled("empty"))) == 0


def test_two_generators_merge():
    root = Coupled("top")
    a = root.add_component(Generator("a", 2.0))
    b = root.add_component(Generator("b", 3.0))
    log = simulate(root, until=12)
    assert log.times() == [2, 3, 4, 6, 6, 8, 9, 10, 12, 12]
    at_six = {r.value for r in log if r.time == 6}
    assert at_six == {"a#3", "b#2"}
    # equal-time ties go in model path order
    assert [r.port for r in log if r.time == 6] == ["top.a.out", "top.b.out"]
    assert a.fired == 6 and b.fired == 4


def test_passive_model_time_advance_is_infinite():
    assert Atomic("idle").time_advance() == INFINITY
    assert INFINITY > 1e300


def test_coincident_input_takes_confluent_path():
    root = Coupled("top")
    gen = root.add_component(Generator("gen", 2.0, limit=1))
    counter = root.add_component(Counter("counter", 2.0))
    root.add_coupling(gen.out, counter.inp)
    simulate(root, until=3)
    assert counter.calls == {"internal": 0, "external": 0, "confluent": 1, "output": 1}


def test_output_only_on_internal_or_confluent():
    root = Coupled("top")
    gen = root.add_component(Generator("gen", 1.0))
    counter = root.add_component(Counter("counter", 2.5))
    root.add_coupling(gen.out, counter.inp)
    simulate(root, until=10)
    c = counter.calls
    assert c["output"] == c["internal"] + c["confluent"]
    assert c["external"] > 0
    assert gen.outputs == gen.fired


def test_external_elapsed_is_time_since_last_transition():
    root = Coupled("top")
    gen = root.add_component(Generator("gen", 0.75))
    counter = root.add_component(Counter("counter", 10.0))
    root.add_coupling(gen.out, counter.inp)
    simulate(root, until=2.0)
    # sigma shrinks by every elapsed interval
    assert counter.sigma == pytest.approx(10.0 - 1.5)


def test_unknown_port_rejected_before_start():
    root = Coupled("top")
    gen = root.add_component(Generator("gen", 1.0))
    sink = root.add_component(Collector("sink"))
    ghost = Port("ghost", sink, True)
    root.add_coupling(gen.out, ghost)
    with pytest.raises(ConfigurationError):
        Coordinator(root)


def test_output_to_output_coupling_rejected():
    root = Coupled("top")
    a = root.add_component(Generator("a", 1.0))
    b = root.add_component(Generator("b", 1.0))
    with pytest.raises(ConfigurationError):
        root.add_coupling(a.out, b.out)


def test_duplicate_component_name_rejected():
    root = Coupled("top")
    root.add_component(Generator("a", 1.0))
    with pytest.raises(ConfigurationError):
        root.add_component(Generator("a", 2.0))


class Broken(Atomic):
    def __init__(self):
        super().__init__("broken")
        self.inp = self.add_in_port("in")

    def external_transition(self, elapsed):
        raise KeyError("no transition for this input")


def test_undefined_transition_reports_path_time_and_event():
    root = Coupled("top")
    gen = root.add_component(Generator("gen", 1.5, limit=1))
    bad = root.add_component(Broken())
    root.add_coupling(gen.out, bad.inp)
    with pytest.raises(SimulationFault) as info:
        simulate(root)
    fault = info.value
    assert fault.path == "top.broken"
    assert fault.time == 1.5
    assert fault.event == ["gen#1"]


class NegativeAdvance(Atomic):
    def time_advance(self):
        return -1.0


def test_negative_time_advance_is_a_fault():
    root = Coupled("top")
    root.add_component(NegativeAdvance("neg"))
    with pytest.raises(SimulationFault):
        simulate(root)


def test_hierarchical_routing_through_nested_coupled():
    root = Coupled("top")
    inner = root.add_component(Coupled("inner"))
    gen = inner.add_component(Generator("gen", 1.0, limit=2))
    inner_out = inner.add_out_port("out")
    inner.add_coupling(gen.out, inner_out)
    outer_sink = Coupled("sinkbox")
    root.add_component(outer_sink)
    box_in = outer_sink.add_in_port("in")
    sink = outer_sink.add_component(Collector("sink"))
    outer_sink.add_coupling(box_in, sink.inp)
    root.add_coupling(inner_out, box_in)
    simulate(root)
    assert sink.seen == [(1.0, "gen#1"), (2.0, "gen#2")]


def test_root_trace_only_logs_root_outputs():
    root = Coupled("top")
    gen = root.add_component(Generator("gen", 1.0, limit=2))
    sink = root.add_component(Collector("sink"))
    out = root.add_out_port("out")
    root.add_coupling(gen.out, sink.inp)
    root.add_coupling(gen.out, out)
    coordinator = Coordinator(root, trace="root")
    log = coordinator.simulate()
    assert [(r.time, r.port) for r in log] == [(1.0, "top.out"), (2.0, "top.out")]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(min_value=1, max_value=9), min_size=1, max_size=5),
       st.integers(min_value=1, max_value=40))
def test_log_is_ordered_and_imminent_set_is_exact(periods, horizon):
    root = Coupled("top")
    gens = [root.add_component(Generator(f"g{i}", p / 4)) for i, p in enumerate(periods)]
    log = simulate(root, until=horizon / 4)
    times = log.times()
    assert times == sorted(times)
    # every generator fires exactly at the multiples of its period, nothing else
    expected = sorted((k * g.period, f"top.{g.name}.out") for g in gens
                      for k in range(1, math.floor(horizon / 4 / g.period + 1e-12) + 1))
    assert sorted((r.time, r.port) for r in log) == expected


def test_two_runs_give_identical_logs():
    logs = []
    for _ in range(2):
        root, *_ = pipeline(0.3, 0.7, 10)
        logs.append([(r.time, r.port, r.value) for r in simulate(root)])
    assert logs[0] == logs[1]
