"""User equipment: access controller with its antenna, and per-application services."""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .base import Reactive
from .devs import Coupled, SimulationFault
from .medium import Tune
from .messages import (AccessRequest, AccessResponse, CreateSession, CreateSessionResponse,
                       EdcQuery, EdcQueryResponse, HandoverAccess, HandoverCommand,
                       HandoverComplete, Pss, RadioConfig, RemoveSession, RemoveSessionResponse,
                       RequestId, RrcReport, ServiceRequest, ServiceResponse)
from .radio import UPLINK_TABLE, Channel, PhysicalPacket, snr_from_rx


class AccessState(enum.Enum):
    DISCONNECTED = "DISCONNECTED"
    DISCOVERING = "DISCOVERING"
    REQUESTING = "REQUESTING"
    CONNECTED = "CONNECTED"
    HANDING_OVER = "HANDING_OVER"


class ServiceState(enum.Enum):
    IDLE = "IDLE"
    CREATING = "CREATING"
    IN_SESSION = "IN_SESSION"
    REMOVING = "REMOVING"


@dataclass
class UeSpec:
    id: str
    tx_power: float = 30.0  # dBm
    gain: float = 0.0
    temperature: float = 300.0
    carrier: float = 33e9
    control_bandwidth: float = 10e6
    control_size: float = 1e3
    pss_period: float = 0.1
    rrc_period: float = 1.0
    backoff: float = 1.0
    discovery_window: float | None = None  # default: two PSS periods

    @property
    def window(self) -> float:
        return self.discovery_window if self.discovery_window is not None else 2 * self.pss_period


@dataclass
class ServiceConfig:
    app: str
    session_messages: int = 20
    request_period: float = 1.0
    message_size: float = 1e6
    create_timeout: float = 0.35
    idle_time: float = 1.0

    def __post_init__(self):
        for name in ("session_messages", "request_period", "message_size", "create_timeout",
                     "idle_time"):
            if not getattr(self, name) > 0:
                raise ValueError(f"service {self.app}: {name} must be positive")


@dataclass(frozen=True)
class Connectivity:
    connected: bool


def record_delay(sent: float, reply: float) -> float:
    if reply < sent:
        raise ValueError("reply precedes request")
    return reply - sent


class UeController(Reactive):
    """Access state machine (discovery, admission, RRC, handover) plus the UE antenna."""

    def __init__(self, spec: UeSpec, start: float = 0.0):
        super().__init__("controller")
        self.spec = spec
        self.start = start
        self.radio_in = self.add_in_port("radio_in")
        self.radio_out = self.add_out_port("radio_out")
        self.tune = self.add_out_port("tune")
        self.from_services = self.add_in_port("from_services")
        self.to_services = self.add_out_port("to_services")

        self.state = AccessState.DISCONNECTED
        self.serving: str | None = None
        self.requested: str | None = None
        self.config: RadioConfig | None = None
        self.listening = False
        self.heard: dict[str, float] = {}
        self.quality: dict[str, float] = {}
        self.queue: list = []
        self._rrc_token = None

    @property
    def ue_id(self) -> str:
        return self.spec.id

    def initialize(self) -> None:
        self.at(self.start, self._discover)

    def _set_state(self, state: AccessState, ap: str | None = None) -> None:
        was_connected = self.state is AccessState.CONNECTED
        self.state = state
        self.record("access", self.ue_id, "state", 1.0 if state is AccessState.CONNECTED else 0.0,
                    f"{state.value}:{ap or ''}")
        if (state is AccessState.CONNECTED) != was_connected:
            self.send(self.to_services, Connectivity(state is AccessState.CONNECTED))

    # -- antenna ---------------------------------------------------------------
    def _listen(self, on: bool) -> None:
        if on != self.listening:
            self.listening = on
            self.send(self.tune, Tune(self.ue_id, on))

    def _control(self, ap: str, message) -> None:
        s = self.spec
        self.send(self.radio_out, PhysicalPacket(
            message, s.control_size, s.tx_power, s.control_bandwidth,
            UPLINK_TABLE.lowest.spectral_efficiency, s.carrier, self.ue_id, ap, Channel.PUCCH,
            sent_at=self.now))

    def _uplink(self, message) -> bool:
        cfg = self.config
        if (self.state is not AccessState.CONNECTED or cfg is None or cfg.ap_id != self.serving
                or cfg.ul_bandwidth * cfg.ul_efficiency <= 0):
            return False
        size = message.size if isinstance(message, ServiceRequest) else self.spec.control_size
        self.send(self.radio_out, PhysicalPacket(
            message, size, self.spec.tx_power, cfg.ul_bandwidth, cfg.ul_efficiency, self.spec.carrier,
            self.ue_id, self.serving, Channel.PUSCH, sent_at=self.now))
        return True

    def _flush(self) -> None:
        pending, self.queue = self.queue, []
        for message in pending:
            if not self._uplink(message):
                self.queue.append(message)

    # -- access state machine -------------------------------------------------
    def _discover(self) -> None:
        self._set_state(AccessState.DISCOVERING)
        self.heard = {}
        self._listen(True)
        self.after(self.spec.window, self._end_discovery)

    def _end_discovery(self) -> None:
        self._listen(False)
        if not self.heard:
            self._discover()
            return
        best = max(sorted(self.heard), key=lambda ap: self.heard[ap])
        self.quality = dict(self.heard)
        self.requested = best
        self._set_state(AccessState.REQUESTING, best)
        self._control(best, AccessRequest(self.ue_id, best, self.heard[best]))

    def _rrc(self) -> None:
        if self.state is not AccessState.CONNECTED:
            self._rrc_token = None
            return
        self.heard = {}
        self._listen(True)
        self._rrc_token = self.after(self.spec.window, self._send_rrc)

    def _send_rrc(self) -> None:
        self._listen(False)
        self._rrc_token = None
        if self.state is AccessState.CONNECTED:
            self.quality = dict(self.heard)
            self._control(self.serving, RrcReport(self.ue_id, self.serving, dict(self.heard)))
            self._rrc_token = self.after(self.spec.rrc_period, self._rrc)

    def _connected(self, ap: str) -> None:
        self.serving = ap
        self.requested = None
        self._set_state(AccessState.CONNECTED, ap)
        if self._rrc_token is None:
            self._rrc_token = self.after(self.spec.rrc_period, self._rrc)
        self._flush()

    def _on_packet(self, packet: PhysicalPacket) -> None:
        msg = packet.payload
        if isinstance(msg, Pss):
            if self.listening:
                self.heard[msg.ap_id] = snr_from_rx(packet.rx_power, self.spec.temperature,
                                                    msg.bandwidth)
        elif isinstance(msg, AccessResponse):
            if self.state is not AccessState.REQUESTING or msg.ap_id != self.requested:
                self.record("access", self.ue_id, "ignored_response", 1.0, msg.ap_id)
            elif msg.granted:
                self._connected(msg.ap_id)
            else:
                self.requested = None
                self._set_state(AccessState.DISCONNECTED)
                self.after(self.spec.backoff, self._discover)
        elif isinstance(msg, RadioConfig):
            if msg.ap_id == self.serving:
                self.config = msg
                self._flush()
        elif isinstance(msg, HandoverCommand):
            if msg.source != self.serving or self.state is not AccessState.CONNECTED:
                return
            self.serving = None
            self.config = None
            self.requested = msg.target
            self._set_state(AccessState.HANDING_OVER, msg.target)
            quality = self.quality.get(msg.target, self.quality.get(msg.source, 0.0))
            self._control(msg.target, HandoverAccess(self.ue_id, msg.target, quality))
        elif isinstance(msg, HandoverComplete):
            if self.state is AccessState.HANDING_OVER and msg.ap_id == self.requested:
                self.record("handover", self.ue_id, "handover", 1.0, msg.ap_id)
                self._connected(msg.ap_id)
        else:
            self.send(self.to_services, msg)

    def on_input(self) -> None:
        for packet in self.radio_in.values:
            self._on_packet(packet)
        for message in self.from_services.values:
            if not self._uplink(message):
                self.queue.append(message)


class Service(Reactive):
    """Session life cycle of one application on one UE."""

    def __init__(self, ue_id: str, config: ServiceConfig, stop: float = float("inf")):
        super().__init__(config.app)
        self.ue_id = ue_id
        self.config = config
        self.stop = stop
        self.inbox = self.add_in_port("inbox")
        self.outbox = self.add_out_port("outbox")

        self.state = ServiceState.IDLE
        self.connected = False
        self.ready = False  # idle period elapsed, waiting for connectivity
        self._idle_token = None
        self._timer = None
        self.seq = 0
        self.edc: str | None = None
        self.create_id: RequestId | None = None
        self.remove_id: RequestId | None = None
        self.first_sent = 0.0
        self.sent_count = 0
        self.outstanding: dict[RequestId, float] = {}
        self.replied = 0
        self.sessions_completed = 0

    def initialize(self) -> None:
        self._start_idle()
        if self.stop != float("inf"):
            self.at(self.stop, self._on_stop)

    def _next_id(self) -> RequestId:
        self.seq += 1
        return RequestId(self.ue_id, self.config.app, self.seq)

    def _set(self, state: ServiceState) -> None:
        self.state = state
        self.record("sessions", f"{self.ue_id}/{self.config.app}", "state",
                    list(ServiceState).index(state), state.value)

    @property
    def stopping(self) -> bool:
        return self.now >= self.stop

    def _start_idle(self) -> None:
        self.ready = False
        self._idle_token = self.after(self.config.idle_time, self._idle_done)

    def _idle_done(self) -> None:
        self._idle_token = None
        if self.stopping:
            return
        if self.connected:
            self._query()
        else:
            self.ready = True

    def _query(self) -> None:
        self.ready = False
        self._set(ServiceState.CREATING)
        self.edc = None
        self.create_id = self._next_id()
        self.send(self.outbox, EdcQuery(self.ue_id, self.config.app))

    def _send_create(self) -> None:
        self.send(self.outbox, CreateSession(self.create_id, self.edc))
        self._timer = self.after(self.config.create_timeout, self._send_create)

    def _cancel_timer(self) -> None:
        if self._timer is not None:
            self.cancel(self._timer)
            self._timer = None

    def _send_request(self) -> None:
        self._timer = None
        if self.state is not ServiceState.IN_SESSION:
            return
        if self.sent_count >= self.config.session_messages or self.stopping:
            self._maybe_remove()
            return
        rid = self._next_id()
        self.outstanding[rid] = self.now
        self.sent_count += 1
        self.send(self.outbox, ServiceRequest(rid, self.edc, self.config.message_size))
        self._timer = self.after(self.config.request_period, self._send_request)

    def _maybe_remove(self) -> None:
        if self.outstanding:
            return
        done = self.sent_count >= self.config.session_messages
        if not (done or self.stopping):
            return
        self._cancel_timer()
        self._set(ServiceState.REMOVING)
        self.remove_id = self._next_id()
        self.first_sent = self.now
        self._send_remove()

    def _send_remove(self) -> None:
        self.send(self.outbox, RemoveSession(self.remove_id, self.edc))
        self._timer = self.after(self.config.create_timeout, self._send_remove)

    def _delay(self, kind: str, sent: float, rid: RequestId) -> None:
        self.record("delay", self.ue_id, kind, record_delay(sent, self.now), str(rid))

    def _on_message(self, msg) -> None:
        if isinstance(msg, Connectivity):
            self.connected = msg.connected
            if self.connected and self.ready and self.state is ServiceState.IDLE and not self.stopping:
                self._query()
        elif isinstance(msg, EdcQueryResponse):
            if self.state is ServiceState.CREATING and self.edc is None:
                self.edc = msg.edc_id
                self.first_sent = self.now
                self._send_create()
        elif isinstance(msg, CreateSessionResponse):
            if self.state is not ServiceState.CREATING or msg.request_id != self.create_id:
                return  # duplicate answer to a resent copy
            self._cancel_timer()
            self._delay("create", self.first_sent, msg.request_id)
            if msg.granted:
                self._set(ServiceState.IN_SESSION)
                self.sent_count = 0
                self.outstanding = {}
                self._send_request()
            else:
                self._set(ServiceState.IDLE)
                self._start_idle()
        elif isinstance(msg, ServiceResponse):
            sent = self.outstanding.pop(msg.request_id, None)
            if sent is None:
                self.record("sessions", self.ue_id, "unknown_reply", 1.0, str(msg.request_id))
                return
            self.replied += 1
            self._delay("request", sent, msg.request_id)
            self._maybe_remove()
        elif isinstance(msg, RemoveSessionResponse):
            if self.state is not ServiceState.REMOVING or msg.request_id != self.remove_id:
                return
            self._cancel_timer()
            self._delay("remove", self.first_sent, msg.request_id)
            self.sessions_completed += 1
            self._set(ServiceState.IDLE)
            self._start_idle()
        else:
            raise SimulationFault(f"service cannot handle {type(msg).__name__}", event=msg)

    def _on_stop(self) -> None:
        if self.state is ServiceState.IN_SESSION:
            self._maybe_remove()

    def on_input(self) -> None:
        for msg in self.inbox.values:
            if getattr(msg, "service", self.config.app) != self.config.app:
                continue
            rid = getattr(msg, "request_id", None)
            if rid is not None and rid.service != self.config.app:
                continue
            self._on_message(msg)


class UserEquipment(Coupled):
    def __init__(self, spec: UeSpec, services: list[ServiceConfig], stop: float = float("inf"),
                 start: float = 0.0):
        super().__init__(spec.id)
        self.spec = spec
        self.controller = UeController(spec, start)
        self.services = [Service(spec.id, cfg, stop) for cfg in services]
        self.radio_in = self.add_in_port("radio_in")
        self.radio_out = self.add_out_port("radio_out")
        self.tune = self.add_out_port("tune")
        self.records = self.add_out_port("records")
        self.add_component(self.controller)
        self.add_coupling(self.radio_in, self.controller.radio_in)
        self.add_coupling(self.controller.radio_out, self.radio_out)
        self.add_coupling(self.controller.tune, self.tune)
        self.add_coupling(self.controller.records, self.records)
        for service in self.services:
            self.add_component(service)
            self.add_coupling(self.controller.to_services, service.inbox)
            self.add_coupling(service.outbox, self.controller.from_services)
            self.add_coupling(service.records, self.records)
