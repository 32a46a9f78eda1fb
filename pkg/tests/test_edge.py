from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fogsim.devs import ConfigurationError, Coupled, SimulationFault, simulate
from fogsim.edge import (DEFAULT_DVFS, REJECT, DvfsConfig, EdcSpec, EdgeDataCenter, HardwarePolicy,
                         ProcessingUnit, PuEvent, PuStatus, Session, SessionState, affine_power,
                         check_dvfs, dispatch, edc_power, federation_report, manage_idle_hardware,
                         maximum_workload, minimum_workload, polynomial_power, pu_power, pu_step,
                         select_dvfs)
from fogsim.messages import (CreateSession, CreateSessionResponse, RemoveSession,
                             RemoveSessionResponse, RequestId, ServiceRequest, ServiceResponse)
from fogsim.radio import Channel, PhysicalPacket

from toymodels import Collector, Script

FLAT = (DvfsConfig(0, 1.0, (50.0, 50.0)),)


class View:
    def __init__(self, utilization, status=PuStatus.ON, capacity=1):
        self.utilization = Fraction(utilization).limit_denominator()
        self.status = status
        self.capacity = Fraction(capacity)


def unit(status=PuStatus.ON, **kw):
    return ProcessingUnit("pu", FLAT, status=status, **kw)


def session(ue="ue", app="app", share="0.2"):
    return Session(app, ue, share)


# -- power -------------------------------------------------------------------

def test_off_unit_draws_nothing():
    assert pu_power(unit(PuStatus.OFF)) == 0.0


def test_affine_power_halfway():
    assert affine_power(0.5, DvfsConfig(0, 1.0, (50.0, 50.0))) == 75.0
    assert affine_power(0.0, DvfsConfig(0, 1.0, (50.0, 50.0))) == 50.0
    assert polynomial_power(0.5, DvfsConfig(0, 1.0, (10.0, 0.0, 40.0))) == 20.0


def test_on_unit_at_zero_utilization_draws_idle():
    assert pu_power(unit()) == 50.0


def test_edc_power_sums_units():
    assert edc_power([unit(PuStatus.OFF) for _ in range(20)]) == 0.0
    assert edc_power([unit() for _ in range(20)]) == 20 * 50.0


def test_federation_slots():
    edcs = {f"edc_{i}": [ProcessingUnit(f"pu_{j}", FLAT) for j in range(20)] for i in range(3)}
    reports = federation_report(edcs, {"app": 0.2})
    assert sum(r.slots["app"] for r in reports) == 300
    assert all(r.power == 0.0 for r in reports)


# -- DVFS ----------------------------------------------------------------------

def test_dvfs_table_needs_full_config():
    with pytest.raises(ConfigurationError):
        check_dvfs([DvfsConfig(0, 0.5)])
    with pytest.raises(ConfigurationError):
        check_dvfs([])
    check_dvfs(DEFAULT_DVFS)


def test_dvfs_picks_lowest_sufficient_config():
    assert select_dvfs(DEFAULT_DVFS, Fraction(0)).index == 0
    assert select_dvfs(DEFAULT_DVFS, Fraction(3, 5)).index == 0
    assert select_dvfs(DEFAULT_DVFS, Fraction(4, 5)).index == 1


def test_dvfs_switches_with_load():
    pu = ProcessingUnit("pu", DEFAULT_DVFS, status=PuStatus.ON)
    for i in range(4):
        pu.submit(PuEvent.CREATE_SESSION, 0.0, session(ue=f"u{i}"))
    pu.advance(10.0)
    assert pu.utilization == Fraction(4, 5)
    assert pu.dvfs.index == 1
    assert pu.power() == pytest.approx(75.0 + 110.0 * 0.8)


# -- state machine -------------------------------------------------------------

def test_power_on_takes_one_second():
    pu = unit(PuStatus.OFF)
    pu_step(pu, PuEvent.POWER_ON, 3.0)
    assert pu.status is PuStatus.POWERING_ON
    assert pu.next_time() == 4.0
    # time advance mid power-on: 0.4 s elapsed of 1.0 s
    assert pu.next_time() - 3.4 == pytest.approx(0.6)
    pu.advance(4.0)
    assert pu.status is PuStatus.ON


def test_session_start_takes_200ms():
    pu = unit()
    s = session()
    pu_step(pu, PuEvent.CREATE_SESSION, 5.0, s)
    assert pu.status is PuStatus.STARTING_SESSION
    assert pu.next_time() == 5.2
    assert pu.advance(5.2) == [("session_started", s)]
    assert s.state is SessionState.ACTIVE
    assert pu.utilization == Fraction(1, 5)


def test_session_stop_is_symmetric():
    pu = unit()
    s = session()
    pu.submit(PuEvent.CREATE_SESSION, 0.0, s)
    pu.advance(0.2)
    pu.submit(PuEvent.REMOVE_SESSION, 1.0, s)
    assert pu.status is PuStatus.STOPPING_SESSION
    assert pu.next_time() == 1.2
    assert pu.advance(1.2) == [("session_stopped", s)]
    assert pu.utilization == 0


def test_create_while_off_is_a_fault():
    with pytest.raises(SimulationFault):
        pu_step(unit(PuStatus.OFF), PuEvent.CREATE_SESSION, 0.0, session())


def test_power_off_with_sessions_is_a_fault():
    pu = unit()
    pu.submit(PuEvent.CREATE_SESSION, 0.0, session())
    pu.advance(0.2)
    with pytest.raises(SimulationFault):
        pu.submit(PuEvent.POWER_OFF, 1.0)


def test_queued_create_after_power_on_accumulates_latencies():
    pu = unit(PuStatus.OFF)
    pu.submit(PuEvent.POWER_ON, 0.0)
    pu.submit(PuEvent.CREATE_SESSION, 0.0, session())
    pu.advance(1.0)
    assert pu.status is PuStatus.STARTING_SESSION
    assert pu.next_time() == pytest.approx(1.2)


def test_power_off_returns_to_zero_power():
    pu = unit()
    pu.submit(PuEvent.POWER_OFF, 0.0)
    assert pu.status is PuStatus.POWERING_OFF and pu.power() == 50.0
    pu.advance(1.0)
    assert pu.status is PuStatus.OFF and pu.power() == 0.0


def test_invalid_session_share():
    with pytest.raises(ValueError):
        Session("app", "ue", 0)
    with pytest.raises(ValueError):
        Session("app", "ue", 1.5)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(["create", "remove", "tick"]), max_size=40))
def test_random_command_sequences_keep_invariants(ops):
    pu = ProcessingUnit("pu", DEFAULT_DVFS, status=PuStatus.ON)
    now, hosted, n = 0.0, [], 0
    for op in ops:
        if op == "create" and pu._hosts_after_queue() < 5:
            n += 1
            s = session(ue=f"u{n}")
            hosted.append(s)
            pu.submit(PuEvent.CREATE_SESSION, now, s)
        elif op == "remove" and hosted:
            pu.submit(PuEvent.REMOVE_SESSION, now, hosted.pop(0))
        now += 0.1
        pu.advance(now)
        assert pu.utilization <= Fraction(str(pu.dvfs.max_utilization))
        assert pu.utilization == sum(s.resource_share for s in pu.sessions.values())
        if pu.status is PuStatus.OFF:
            assert not pu.sessions


# -- dispatch -------------------------------------------------------------------

def test_minimum_picks_least_loaded():
    pus = [View(0.4), View(0.2), View(0.6)]
    assert dispatch(session(), pus, "minimum") == 1


def test_maximum_picks_most_loaded_that_fits():
    pus = [View(0.4), View(0.2), View(0.6)]
    assert dispatch(session(), pus, "maximum") == 2
    assert dispatch(session(), [View(0.4), View(0.9), View(0.6)], "maximum") == 2


def test_full_units_reject():
    pus = [View(1), View(1)]
    assert dispatch(session(), pus, "minimum") is REJECT
    assert dispatch(session(), pus, "maximum") is REJECT


def test_maximum_prefers_powered_units():
    pus = [View(0, PuStatus.OFF), View(0.2, PuStatus.ON), View(0, PuStatus.OFF)]
    assert maximum_workload(Fraction(1, 5), pus) == 1
    pus[1].utilization = Fraction(1)
    assert maximum_workload(Fraction(1, 5), pus) == 0


def test_minimum_counts_off_units():
    pus = [View(0.2, PuStatus.ON), View(0, PuStatus.OFF)]
    assert minimum_workload(Fraction(1, 5), pus) == 1


def test_ties_break_on_lowest_id():
    pus = [View(0.2), View(0.2), View(0.2)]
    assert minimum_workload(Fraction(1, 5), pus) == 0
    assert maximum_workload(Fraction(1, 5), pus) == 0


@given(st.lists(st.integers(0, 10), min_size=1, max_size=8), st.integers(1, 10),
       st.sampled_from(["minimum", "maximum"]))
def test_dispatch_never_overfills(loads, share, strategy):
    pus = [View(Fraction(u, 10)) for u in loads]
    choice = dispatch(Session("a", "u", Fraction(share, 10)), pus, strategy)
    fits = [i for i, pu in enumerate(pus) if pu.utilization + Fraction(share, 10) <= 1]
    if not fits:
        assert choice is REJECT
    else:
        assert choice in fits


# -- idle hardware policy ----------------------------------------------------

def test_power_off_idle_shuts_empty_units():
    pus = [View(0), View(0.2), View(0, PuStatus.OFF)]
    assert manage_idle_hardware(pus, HardwarePolicy.POWER_OFF_IDLE) == [(0, PuEvent.POWER_OFF)]


def test_always_on_leaves_idle_units_alone():
    pus = [View(0), View(0.2)]
    assert manage_idle_hardware(pus, HardwarePolicy.ALWAYS_ON) == []


# -- data center model ---------------------------------------------------------

RID = RequestId("ue_1", "app", 0)


def packet(msg):
    return PhysicalPacket(msg, 1e3, 30, 1e9, 1.0, 33e9, "ap_0", "edc", Channel.XH_UP)


def run_edc(schedule, hardware="always_on", dispatch_name="minimum", pus=2, until=30.0):
    root = Coupled("top")
    spec = EdcSpec("edc", (0.0, 0.0), pus=pus, dvfs=FLAT, hardware=hardware,
                   dispatch=dispatch_name, processing_latency=0.001)
    edc = root.add_component(EdgeDataCenter(spec, {"app": 0.2}, "sdn", 30, 10e9, 33e9, 1e3))
    script = root.add_component(Script("script", [(t, packet(m)) for t, m in schedule]))
    sink = root.add_component(Collector("sink"))
    records = root.add_component(Collector("records"))
    root.add_coupling(script.out, edc.xh_in)
    root.add_coupling(edc.xh_out, sink.inp)
    root.add_coupling(edc.records, records.inp)
    simulate(root, until=until)
    replies = [(t, p.payload) for t, p in sink.seen if not type(p.payload).__name__ == "EdcReport"]
    return replies, [r for _, r in records.seen]


def test_warm_session_lifecycle():
    replies, _ = run_edc([
        (1.0, CreateSession(RID, "edc", "ap_0")),
        (2.0, ServiceRequest(RequestId("ue_1", "app", 1), "edc", 1e6, "ap_0")),
        (3.0, RemoveSession(RequestId("ue_1", "app", 2), "edc", "ap_0")),
    ])
    kinds = [(t, type(m).__name__) for t, m in replies]
    assert kinds[0] == (pytest.approx(1.2), "CreateSessionResponse")
    assert kinds[1] == (pytest.approx(2.001), "ServiceResponse")
    assert kinds[2] == (pytest.approx(3.2), "RemoveSessionResponse")
    assert replies[0][1].granted and replies[1][1].ok


def test_cold_session_includes_power_on():
    replies, records = run_edc([(1.0, CreateSession(RID, "edc", "ap_0"))], hardware="power_off_idle",
                               dispatch_name="maximum")
    assert replies[0][0] == pytest.approx(2.2)
    assert any(r.metric == "dispatch_cold" for r in records)


def test_idle_unit_powered_off_after_last_session():
    _, records = run_edc([
        (1.0, CreateSession(RID, "edc", "ap_0")),
        (5.0, RemoveSession(RequestId("ue_1", "app", 1), "edc", "ap_0")),
    ], hardware="power_off_idle", dispatch_name="maximum")
    power = [(r.time, r.value) for r in records if r.stream == "power"]
    assert power[-1] == (pytest.approx(6.2), 0.0)
    off = [r for r in records if r.stream == "pu" and r.metric == "power_w" and r.ref == "OFF"]
    assert all(r.value == 0.0 for r in off)


def test_unknown_session_request_is_refused():
    replies, _ = run_edc([(1.0, ServiceRequest(RID, "edc", 1e6, "ap_0"))])
    assert replies == [(1.0, ServiceResponse(RID, "edc", False, "ap_0"))]


def test_simultaneous_requests_both_answered():
    rid1, rid2 = RequestId("ue_1", "app", 1), RequestId("ue_1", "app", 2)
    replies, _ = run_edc([
        (1.0, CreateSession(RID, "edc", "ap_0")),
        (2.0, ServiceRequest(rid1, "edc", 1e6, "ap_0")),
        (2.0, ServiceRequest(rid2, "edc", 1e6, "ap_0")),
    ])
    answered = {m.request_id: t for t, m in replies if isinstance(m, ServiceResponse)}
    assert answered == {rid1: pytest.approx(2.001), rid2: pytest.approx(2.001)}


def test_full_federation_rejects():
    schedule = [(1.0, CreateSession(RequestId(f"ue_{i}", "app", 0), "edc", "ap_0")) for i in range(6)]
    replies, _ = run_edc(schedule, pus=1)
    grants = [m.granted for _, m in replies if isinstance(m, CreateSessionResponse)]
    assert grants.count(True) == 5 and grants.count(False) == 1


def test_duplicate_create_gets_one_session():
    replies, records = run_edc([
        (1.0, CreateSession(RID, "edc", "ap_0")),
        (1.1, CreateSession(RID, "edc", "ap_0")),
    ])
    creates = [m for _, m in replies if isinstance(m, CreateSessionResponse)]
    assert len(creates) == 2 and all(m.granted for m in creates)
    assert sum(r.metric.startswith("dispatch_") for r in records) == 1


def test_remove_unknown_session_is_acknowledged():
    rid = RequestId("ghost", "app", 3)
    replies, _ = run_edc([(1.0, RemoveSession(rid, "edc", "ap_0"))])
    assert replies == [(1.0, RemoveSessionResponse(rid, "edc", "ap_0"))]
