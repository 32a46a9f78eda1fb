"""Edge data centers: processing units, resource manager and network interface."""
from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Protocol, Sequence

from .base import Reactive
from .devs import ConfigurationError, Coupled, SimulationFault
from .messages import (CreateSession, CreateSessionResponse, EdcReport, Location, RemoveSession,
                       RemoveSessionResponse, RequestId, ServiceRequest, ServiceResponse)
from .radio import Channel, PhysicalPacket

REJECT = None


def as_share(value) -> Fraction:
    """Exact representation of a resource share such as 0.2."""
    if isinstance(value, Fraction):
        return value
    return Fraction(str(value)).limit_denominator(1_000_000)


class PuStatus(enum.Enum):
    OFF = "OFF"
    POWERING_ON = "POWERING_ON"
    ON = "ON"
    STARTING_SESSION = "STARTING_SESSION"
    STOPPING_SESSION = "STOPPING_SESSION"
    POWERING_OFF = "POWERING_OFF"

    @property
    def powered(self) -> bool:
        """True when the unit is (or is about to be) able to host sessions."""
        return self not in (PuStatus.OFF, PuStatus.POWERING_OFF)


class PuEvent(enum.Enum):
    POWER_ON = "POWER_ON"
    POWER_OFF = "POWER_OFF"
    CREATE_SESSION = "CREATE_SESSION"
    REMOVE_SESSION = "REMOVE_SESSION"


class SessionState(enum.Enum):
    REQUESTED = "REQUESTED"
    ACTIVE = "ACTIVE"
    CLOSING = "CLOSING"


SessionKey = tuple[str, str]  # (ue id, service id)


@dataclass
class Session:
    service: str
    ue: str
    resource_share: Fraction
    state: SessionState = SessionState.REQUESTED

    def __post_init__(self):
        self.resource_share = as_share(self.resource_share)
        if not 0 < self.resource_share <= 1:
            raise ValueError(f"resource share must be in (0, 1], got {self.resource_share}")

    @property
    def key(self) -> SessionKey:
        return (self.ue, self.service)


@dataclass(frozen=True)
class DvfsConfig:
    index: int
    max_utilization: float
    power_params: tuple[float, ...] = (50.0, 50.0)


class PowerModel(Protocol):
    def __call__(self, utilization: float, config: DvfsConfig) -> float: ...


def affine_power(utilization: float, config: DvfsConfig) -> float:
    idle_w, slope_w = config.power_params[:2]
    return idle_w + slope_w * utilization


def polynomial_power(utilization: float, config: DvfsConfig) -> float:
    """sum(c_i * u**i) over the configuration's coefficients."""
    return sum(c * utilization ** i for i, c in enumerate(config.power_params))


POWER_MODELS: dict[str, PowerModel] = {"affine": affine_power, "polynomial": polynomial_power}

DEFAULT_DVFS = (
    DvfsConfig(0, 0.6, (60.0, 80.0)),
    DvfsConfig(1, 1.0, (75.0, 110.0)),
)


def check_dvfs(table: Sequence[DvfsConfig]) -> None:
    if not table:
        raise ConfigurationError("DVFS table is empty")
    if not any(cfg.max_utilization == 1 for cfg in table):
        raise ConfigurationError("DVFS table needs one configuration with max_utilization = 1")
    for cfg in table:
        if not 0 < cfg.max_utilization <= 1:
            raise ConfigurationError(f"DVFS max_utilization out of range: {cfg}")


def select_dvfs(table: Sequence[DvfsConfig], utilization) -> DvfsConfig:
    """Lowest-index configuration able to serve ``utilization``."""
    for cfg in sorted(table, key=lambda c: c.index):
        if as_share(cfg.max_utilization) >= utilization:
            return cfg
    raise SimulationFault(f"no DVFS configuration can hold utilization {float(utilization)}")


@dataclass
class _Op:
    kind: PuEvent
    session: Session | None = None


class ProcessingUnit:
    """Processing unit state machine with its power accounting.

    Commands are queued and executed one at a time; each transitional
    status lasts its configured latency.  ``advance(now)`` completes the
    current operation once its deadline is reached.
    """

    def __init__(self, pu_id: str, dvfs: Sequence[DvfsConfig] = DEFAULT_DVFS,
                 power_model: PowerModel = affine_power, power_on_latency: float = 1.0,
                 power_off_latency: float = 1.0, session_start_latency: float = 0.2,
                 session_stop_latency: float = 0.2, status: PuStatus = PuStatus.OFF):
        check_dvfs(dvfs)
        self.id = pu_id
        self.dvfs_table = tuple(sorted(dvfs, key=lambda c: c.index))
        self.power_model = power_model
        self.power_on_latency = power_on_latency
        self.power_off_latency = power_off_latency
        self.session_start_latency = session_start_latency
        self.session_stop_latency = session_stop_latency
        if status not in (PuStatus.OFF, PuStatus.ON):
            raise ValueError("a processing unit starts either OFF or ON")
        self.status = status
        self.sessions: dict[SessionKey, Session] = {}
        self.queue: deque[_Op] = deque()
        self.current: _Op | None = None
        self.busy_until = math.inf
        self.dvfs = self.dvfs_table[0]

    # -- observables ---------------------------------------------------
    @property
    def utilization(self) -> Fraction:
        return sum((s.resource_share for s in self.sessions.values()), Fraction(0))

    @property
    def capacity(self) -> Fraction:
        return max(as_share(c.max_utilization) for c in self.dvfs_table)

    def power(self) -> float:
        if self.status is PuStatus.OFF:
            return 0.0
        return self.power_model(float(self.utilization), self.dvfs)

    def next_time(self) -> float:
        return self.busy_until

    def _will_be_powered(self) -> bool:
        powered = self.status not in (PuStatus.OFF, PuStatus.POWERING_OFF)
        if self.current is not None and self.current.kind is PuEvent.POWER_ON:
            powered = True
        for op in self.queue:
            if op.kind is PuEvent.POWER_ON:
                powered = True
            elif op.kind is PuEvent.POWER_OFF:
                powered = False
        return powered

    def _hosts_after_queue(self) -> int:
        count = len(self.sessions)
        if self.current is not None:
            if self.current.kind is PuEvent.CREATE_SESSION:
                count += 1
            elif self.current.kind is PuEvent.REMOVE_SESSION:
                count -= 1
        for op in self.queue:
            if op.kind is PuEvent.CREATE_SESSION:
                count += 1
            elif op.kind is PuEvent.REMOVE_SESSION:
                count -= 1
        return count

    # -- commands ------------------------------------------------------
    def submit(self, event: PuEvent, now: float, session: Session | None = None) -> None:
        if event is PuEvent.CREATE_SESSION:
            if session is None:
                raise ValueError("CREATE_SESSION needs a session")
            if not self._will_be_powered():
                raise SimulationFault(f"{self.id}: CREATE_SESSION while {self.status.value}",
                                      event=event)
        elif event is PuEvent.REMOVE_SESSION:
            if session is None:
                raise ValueError("REMOVE_SESSION needs a session")
        elif event is PuEvent.POWER_OFF:
            if self._hosts_after_queue() > 0:
                raise SimulationFault(f"{self.id}: POWER_OFF with sessions", event=event)
        self.queue.append(_Op(event, session))
        if self.current is None:
            self._start_next(now)

    def _start_next(self, now: float) -> None:
        while self.queue:
            op = self.queue.popleft()
            if op.kind is PuEvent.POWER_ON:
                if self.status is not PuStatus.OFF:
                    continue
                self.status, delay = PuStatus.POWERING_ON, self.power_on_latency
            elif op.kind is PuEvent.POWER_OFF:
                if self.status is PuStatus.OFF:
                    continue
                if self.sessions:
                    raise SimulationFault(f"{self.id}: POWER_OFF with sessions", event=op.kind)
                self.status, delay = PuStatus.POWERING_OFF, self.power_off_latency
            elif op.kind is PuEvent.CREATE_SESSION:
                if self.status is PuStatus.OFF:
                    raise SimulationFault(f"{self.id}: CREATE_SESSION while OFF", event=op.kind)
                if op.session.key in self.sessions:
                    continue
                if self.utilization + op.session.resource_share > self.capacity:
                    raise SimulationFault(f"{self.id}: session exceeds capacity", event=op.kind)
                self.status, delay = PuStatus.STARTING_SESSION, self.session_start_latency
            else:
                hosted = self.sessions.get(op.session.key)
                if hosted is None:
                    continue
                hosted.state = SessionState.CLOSING
                self.status, delay = PuStatus.STOPPING_SESSION, self.session_stop_latency
            self.current = op
            self.busy_until = now + delay
            return
        self.current = None
        self.busy_until = math.inf

    def advance(self, now: float) -> list[tuple[str, Session | None]]:
        """Complete the running operation if due; return the notifications."""
        notes: list[tuple[str, Session | None]] = []
        while self.current is not None and self.busy_until <= now:
            op, done_at = self.current, self.busy_until
            if op.kind is PuEvent.POWER_ON:
                self.status = PuStatus.ON
                notes.append(("powered_on", None))
            elif op.kind is PuEvent.POWER_OFF:
                self.status = PuStatus.OFF
                self.dvfs = self.dvfs_table[0]
                notes.append(("powered_off", None))
            elif op.kind is PuEvent.CREATE_SESSION:
                op.session.state = SessionState.ACTIVE
                self.sessions[op.session.key] = op.session
                self.status = PuStatus.ON
                self.dvfs = select_dvfs(self.dvfs_table, self.utilization)
                notes.append(("session_started", op.session))
            else:
                session = self.sessions.pop(op.session.key)
                self.status = PuStatus.ON
                self.dvfs = select_dvfs(self.dvfs_table, self.utilization)
                notes.append(("session_stopped", session))
            self.current = None
            self._start_next(done_at)
        return notes


def pu_power(pu: ProcessingUnit, t: float | None = None) -> float:
    return pu.power()


def pu_step(pu: ProcessingUnit, event: PuEvent, now: float,
            session: Session | None = None) -> ProcessingUnit:
    pu.submit(event, now, session)
    return pu


# ---------------------------------------------------------------------------
# dispatching

class PuView(Protocol):
    status: PuStatus
    utilization: Fraction
    capacity: Fraction


def _fits(pu: PuView, share: Fraction) -> bool:
    return pu.utilization + share <= pu.capacity


def minimum_workload(share: Fraction, pus: Sequence[PuView]) -> int | None:
    candidates = [i for i, pu in enumerate(pus) if _fits(pu, share)]
    if not candidates:
        return REJECT
    return min(candidates, key=lambda i: (pus[i].utilization, i))


def maximum_workload(share: Fraction, pus: Sequence[PuView]) -> int | None:
    candidates = [i for i, pu in enumerate(pus) if _fits(pu, share)]
    powered = [i for i in candidates if pus[i].status.powered]
    if powered:
        return max(powered, key=lambda i: (pus[i].utilization, -i))
    return candidates[0] if candidates else REJECT


DispatchStrategy = Callable[[Fraction, Sequence[PuView]], "int | None"]
DISPATCH_STRATEGIES: dict[str, DispatchStrategy] = {
    "minimum": minimum_workload,
    "maximum": maximum_workload,
}


def dispatch(request: Session, pus: Sequence[PuView], strategy: DispatchStrategy | str) -> int | None:
    if isinstance(strategy, str):
        strategy = DISPATCH_STRATEGIES[strategy]
    if request.resource_share > 1:
        raise ValueError("resource share above one processing unit")
    return strategy(request.resource_share, pus)


class HardwarePolicy(enum.Enum):
    ALWAYS_ON = "always_on"
    POWER_OFF_IDLE = "power_off_idle"


def manage_idle_hardware(pus: Sequence[PuView], policy: HardwarePolicy) -> list[tuple[int, PuEvent]]:
    """Power commands implied by the unused-hardware policy."""
    commands = []
    for i, pu in enumerate(pus):
        if policy is HardwarePolicy.ALWAYS_ON:
            if not pu.status.powered:
                commands.append((i, PuEvent.POWER_ON))
        elif pu.status is PuStatus.ON and pu.utilization == 0:
            commands.append((i, PuEvent.POWER_OFF))
    return commands


# ---------------------------------------------------------------------------
# DEVS models

@dataclass
class PuReport:
    pu_index: int
    status: PuStatus
    utilization: float
    power: float
    dvfs: int
    handled: int = 0  # commands processed so far


@dataclass
class PuCommand:
    event: PuEvent | None
    session: Session | None = None
    request: ServiceRequest | None = None


@dataclass
class PuNotice:
    pu_index: int
    kind: str
    session: Session | None = None
    request: ServiceRequest | None = None


class ProcessingUnitModel(Reactive):
    def __init__(self, name: str, index: int, edc_id: str, pu: ProcessingUnit,
                 processing_latency: float = 0.001):
        super().__init__(name)
        self.index = index
        self.edc_id = edc_id
        self.pu = pu
        self.processing_latency = processing_latency
        self.cmd = self.add_in_port("cmd")
        self.report = self.add_out_port("report")
        self._token = None
        self._last = None
        self.handled = 0

    def initialize(self) -> None:
        self._publish()

    def _publish(self) -> None:
        pu = self.pu
        snapshot = (pu.status, pu.utilization, pu.dvfs.index, self.handled)
        if snapshot == self._last:
            return
        self._last = snapshot
        power = pu.power()
        self.send(self.report, PuReport(self.index, pu.status, float(pu.utilization), power,
                                        pu.dvfs.index, self.handled))
        entity = f"{self.edc_id}/{pu.id}"
        self.record("pu", entity, "power_w", power, pu.status.value)
        self.record("pu", entity, "utilization", float(pu.utilization), pu.status.value)

    def _reschedule(self) -> None:
        if self._token is not None:
            self.cancel(self._token)
            self._token = None
        if self.pu.next_time() != math.inf:
            self._token = self.at(self.pu.next_time(), self._complete)

    def _complete(self) -> None:
        self._token = None
        for kind, session in self.pu.advance(self.now):
            if kind in ("session_started", "session_stopped"):
                self.send(self.report, PuNotice(self.index, kind, session))
        self._publish()
        self._reschedule()

    def _respond(self, request: ServiceRequest) -> None:
        self.send(self.report, PuNotice(self.index, "request_done", request=request))

    def on_input(self) -> None:
        for command in self.cmd.values:
            self.handled += 1
            if command.request is not None:
                self.after(self.processing_latency, self._respond, command.request)
            else:
                self.pu.submit(command.event, self.now, command.session)
        self._publish()
        self._reschedule()


@dataclass
class _PuSlot:
    """Resource-manager bookkeeping for one processing unit."""

    status: PuStatus
    utilization: Fraction  # reserved, including sessions still starting
    capacity: Fraction
    power: float = 0.0
    sent: int = 0  # commands issued to the unit


@dataclass
class _SessionEntry:
    session: Session
    pu_index: int
    origin: RequestId
    create_waiters: list[tuple[RequestId, str]] = field(default_factory=list)
    remove_waiters: list[tuple[RequestId, str]] = field(default_factory=list)


class ResourceManager(Reactive):
    def __init__(self, name: str, edc_id: str, pus: Sequence[ProcessingUnit],
                 strategy: str, policy: HardwarePolicy, app_shares: Mapping[str, float]):
        super().__init__(name)
        if strategy not in DISPATCH_STRATEGIES:
            raise ConfigurationError(f"unknown dispatch strategy {strategy!r}")
        self.edc_id = edc_id
        self.strategy_name = strategy
        self.strategy = DISPATCH_STRATEGIES[strategy]
        self.policy = policy
        self.app_shares = {app: as_share(s) for app, s in app_shares.items()}
        self.slots = [_PuSlot(pu.status, Fraction(0), pu.capacity) for pu in pus]
        self.requests = self.add_in_port("requests")
        self.pu_reports = self.add_in_port("pu_reports")
        self.responses = self.add_out_port("responses")
        self.pu_cmd = [self.add_out_port(f"pu_cmd_{i}") for i in range(len(pus))]
        self.sessions: dict[SessionKey, _SessionEntry] = {}
        self.rejected: set[RequestId] = set()
        self.closed: set[RequestId] = set()
        self._power = None
        self._last_slots = None

    # -- helpers ---------------------------------------------------------
    def free_slots(self) -> dict[str, int]:
        result = {}
        for app, share in sorted(self.app_shares.items()):
            result[app] = sum(int((s.capacity - s.utilization) // share) for s in self.slots)
        return result

    def _report(self, force: bool = False) -> None:
        slots = self.free_slots()
        if force or slots != self._last_slots:
            self._last_slots = slots
            self.send(self.responses, EdcReport(self.edc_id, slots, self._power or 0.0))

    def initialize(self) -> None:
        self._power = 0.0
        self.record("power", self.edc_id, "power_w", 0.0)
        self._report(force=True)

    def _command(self, index: int, event: PuEvent | None, session=None, request=None) -> None:
        self.slots[index].sent += 1
        self.send(self.pu_cmd[index], PuCommand(event, session, request))

    def _reply(self, message) -> None:
        self.send(self.responses, message)

    # -- message handling --------------------------------------------------
    def _on_create(self, msg: CreateSession) -> None:
        rid = msg.request_id
        key = (rid.ue, rid.service)
        self.record("sessions", self.edc_id, "create_request", 1.0, str(rid))
        entry = self.sessions.get(key)
        if entry is not None:
            state = entry.session.state
            if state is SessionState.ACTIVE:
                self._grant(rid, msg.ap_id, True)
            elif state is SessionState.REQUESTED:
                entry.create_waiters.append((rid, msg.ap_id))
            else:
                self._grant(rid, msg.ap_id, False)
            return
        if rid in self.rejected or rid in self.closed:
            # a late copy of an already handled request
            self._grant(rid, msg.ap_id, False)
            return
        share = self.app_shares.get(rid.service)
        if share is None:
            self.rejected.add(rid)
            self._grant(rid, msg.ap_id, False)
            return
        session = Session(rid.service, rid.ue, share)
        index = dispatch(session, self.slots, self.strategy)
        if index is REJECT:
            self.rejected.add(rid)
            self._grant(rid, msg.ap_id, False)
            return
        slot = self.slots[index]
        temperature = {PuStatus.OFF: "cold", PuStatus.POWERING_OFF: "cold",
                       PuStatus.POWERING_ON: "warming"}.get(slot.status, "warm")
        self.record("sessions", f"{self.edc_id}/pu_{index}", f"dispatch_{temperature}", 1.0, str(rid))
        if not slot.status.powered:
            self._command(index, PuEvent.POWER_ON)
            slot.status = PuStatus.POWERING_ON
        slot.utilization += share
        self.sessions[key] = _SessionEntry(session, index, rid, [(rid, msg.ap_id)])
        self._command(index, PuEvent.CREATE_SESSION, session)
        self._report()

    def _grant(self, rid: RequestId, ap_id: str, granted: bool) -> None:
        metric = "create_granted" if granted else "create_rejected"
        self.record("sessions", self.edc_id, metric, 1.0, str(rid))
        self._reply(CreateSessionResponse(rid, self.edc_id, granted, ap_id))

    def _on_remove(self, msg: RemoveSession) -> None:
        rid = msg.request_id
        key = (rid.ue, rid.service)
        self.record("sessions", self.edc_id, "remove_request", 1.0, str(rid))
        entry = self.sessions.get(key)
        if entry is None:
            self._removed(rid, msg.ap_id)
            return
        if entry.session.state is SessionState.REQUESTED:
            # cannot stop a session that is still starting; answer once it is up
            entry.remove_waiters.append((rid, msg.ap_id))
            return
        entry.remove_waiters.append((rid, msg.ap_id))
        if entry.session.state is SessionState.ACTIVE:
            entry.session.state = SessionState.CLOSING
            self._command(entry.pu_index, PuEvent.REMOVE_SESSION, entry.session)

    def _removed(self, rid: RequestId, ap_id: str) -> None:
        self.record("sessions", self.edc_id, "remove_response", 1.0, str(rid))
        self._reply(RemoveSessionResponse(rid, self.edc_id, ap_id))

    def _on_service(self, msg: ServiceRequest) -> None:
        rid = msg.request_id
        entry = self.sessions.get((rid.ue, rid.service))
        if entry is None or entry.session.state is not SessionState.ACTIVE:
            self._reply(ServiceResponse(rid, self.edc_id, False, msg.ap_id))
            return
        self._command(entry.pu_index, None, request=msg)

    def _on_notice(self, notice: PuNotice) -> None:
        if notice.kind == "request_done":
            msg = notice.request
            self._reply(ServiceResponse(msg.request_id, self.edc_id, True, msg.ap_id))
            return
        key = notice.session.key
        entry = self.sessions[key]
        if notice.kind == "session_started":
            for rid, ap_id in entry.create_waiters:
                self._grant(rid, ap_id, True)
            entry.create_waiters.clear()
            if entry.remove_waiters:
                entry.session.state = SessionState.CLOSING
                self._command(entry.pu_index, PuEvent.REMOVE_SESSION, entry.session)
        elif notice.kind == "session_stopped":
            del self.sessions[key]
            self.closed.add(entry.origin)
            self.record("sessions", self.edc_id, "session_closed", 1.0, str(entry.origin))
            slot = self.slots[entry.pu_index]
            slot.utilization -= entry.session.resource_share
            for rid, ap_id in entry.remove_waiters:
                self._removed(rid, ap_id)
            self._apply_policy()
            self._report()

    def _apply_policy(self) -> None:
        for index, event in manage_idle_hardware(self.slots, self.policy):
            if event is PuEvent.POWER_OFF:
                self.slots[index].status = PuStatus.POWERING_OFF
            else:
                self.slots[index].status = PuStatus.POWERING_ON
            self._command(index, event)

    def _on_pu_report(self, report: PuReport) -> None:
        slot = self.slots[report.pu_index]
        # a report crossing one of our commands is stale
        if report.handled == slot.sent:
            slot.status = report.status
        slot.power = report.power
        total = sum(s.power for s in self.slots)
        if total != self._power:
            self._power = total
            self.record("power", self.edc_id, "power_w", total)

    def on_input(self) -> None:
        for item in self.pu_reports.values:
            if isinstance(item, PuReport):
                self._on_pu_report(item)
        for item in self.pu_reports.values:
            if isinstance(item, PuNotice):
                self._on_notice(item)
        for msg in self.requests.values:
            if isinstance(msg, CreateSession):
                self._on_create(msg)
            elif isinstance(msg, RemoveSession):
                self._on_remove(msg)
            elif isinstance(msg, ServiceRequest):
                self._on_service(msg)
            else:
                raise SimulationFault(f"resource manager cannot handle {type(msg).__name__}", event=msg)


class DataCenterInterface(Reactive):
    """Encapsulates outgoing messages into crosshaul packets and back."""

    def __init__(self, name: str, edc_id: str, sdn_id: str, tx_power: float, rate: float,
                 carrier: float, control_size: float):
        super().__init__(name)
        self.edc_id = edc_id
        self.sdn_id = sdn_id
        self.tx_power = tx_power
        self.rate = rate
        self.carrier = carrier
        self.control_size = control_size
        self.xh_in = self.add_in_port("xh_in")
        self.from_rm = self.add_in_port("from_rm")
        self.xh_out = self.add_out_port("xh_out")
        self.to_rm = self.add_out_port("to_rm")

    def on_input(self) -> None:
        for packet in self.xh_in.values:
            self.send(self.to_rm, packet.payload)
        for msg in self.from_rm.values:
            destination = self.sdn_id if isinstance(msg, EdcReport) else msg.ap_id
            self.send(self.xh_out, PhysicalPacket(
                msg, self.control_size, self.tx_power, self.rate, 1.0, self.carrier,
                self.edc_id, destination, Channel.XH_DOWN, sent_at=self.now))


@dataclass
class EdcSpec:
    id: str
    location: Location
    pus: int = 20
    dvfs: tuple[DvfsConfig, ...] = DEFAULT_DVFS
    power_model: str = "affine"
    power_on_latency: float = 1.0
    power_off_latency: float = 1.0
    session_start_latency: float = 0.2
    session_stop_latency: float = 0.2
    processing_latency: float = 0.001
    dispatch: str = "minimum"
    hardware: str = "always_on"


class EdgeDataCenter(Coupled):
    def __init__(self, spec: EdcSpec, app_shares: Mapping[str, float], sdn_id: str,
                 tx_power: float, rate: float, carrier: float, control_size: float):
        super().__init__(spec.id)
        self.spec = spec
        policy = HardwarePolicy(spec.hardware)
        initial = PuStatus.ON if policy is HardwarePolicy.ALWAYS_ON else PuStatus.OFF
        model = POWER_MODELS[spec.power_model]
        units = [ProcessingUnit(f"pu_{i}", spec.dvfs, model, spec.power_on_latency,
                                spec.power_off_latency, spec.session_start_latency,
                                spec.session_stop_latency, initial) for i in range(spec.pus)]
        self.interface = DataCenterInterface("interface", spec.id, sdn_id, tx_power, rate,
                                             carrier, control_size)
        self.manager = ResourceManager("manager", spec.id, units, spec.dispatch, policy, app_shares)
        self.units = [ProcessingUnitModel(pu.id, i, spec.id, pu, spec.processing_latency)
                      for i, pu in enumerate(units)]
        self.xh_in = self.add_in_port("xh_in")
        self.xh_out = self.add_out_port("xh_out")
        self.records = self.add_out_port("records")
        for m in (self.interface, self.manager, *self.units):
            self.add_component(m)
            self.add_coupling(m.records, self.records)
        self.add_coupling(self.xh_in, self.interface.xh_in)
        self.add_coupling(self.interface.xh_out, self.xh_out)
        self.add_coupling(self.interface.to_rm, self.manager.requests)
        self.add_coupling(self.manager.responses, self.interface.from_rm)
        for i, unit in enumerate(self.units):
            self.add_coupling(self.manager.pu_cmd[i], unit.cmd)
            self.add_coupling(unit.report, self.manager.pu_reports)


def edc_power(units: Iterable[ProcessingUnit], t: float | None = None) -> float:
    return sum(pu.power() for pu in units)


@dataclass(frozen=True)
class EdcStatusReport:
    edc_id: str
    slots: dict[str, int]
    power: float


def federation_report(edcs: Mapping[str, Sequence[ProcessingUnit]],
                      app_shares: Mapping[str, float]) -> list[EdcStatusReport]:
    reports = []
    for edc_id, units in edcs.items():
        slots = {}
        for app, share in app_shares.items():
            share = as_share(share)
            slots[app] = sum(int((pu.capacity - pu.utilization) // share) for pu in units)
        reports.append(EdcStatusReport(edc_id, slots, edc_power(units)))
    return reports
