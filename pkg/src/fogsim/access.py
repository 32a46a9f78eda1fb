"""Access point: PSS beacons, admission, bandwidth sharing, MCS tracking,
handover management and session routing."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, replace
from typing import Mapping

from .base import Reactive
from .devs import SimulationFault
from .messages import (SERVICE_DOWNLINK, SERVICE_UPLINK, AccessRequest, AccessResponse,
                       AmfRequest, AmfResponse, DisconnectRequest, EdcQuery, EdcQueryResponse,
                       HandoverAccess, HandoverCommand, HandoverComplete, HandoverRequest,
                       HandoverResponse, Location, Pss, RadioConfig, RrcReport, SdnTableUpdate,
                       ServiceRequest)
from .radio import (BROADCAST, DOWNLINK_TABLE, UPLINK_TABLE, BANDWIDTH_STRATEGIES, Channel,
                    McsEntry, McsTable, PhysicalPacket, select_mcs, snr_from_rx)


@dataclass
class ApSpec:
    id: str
    location: Location
    tx_power: float = 50.0  # dBm
    gain: float = 0.0  # dB
    temperature: float = 300.0  # K
    bandwidth: float = 100e6  # Hz, per direction (FDD)
    carrier: float = 33e9  # Hz
    strategy: str = "even"
    pss_period: float = 0.1
    handover_margin: float = 3.0  # dB
    control_bandwidth: float = 10e6
    control_size: float = 1e3  # bits


def downlink_snr(quality: float, total_bandwidth: float, share: float) -> float:
    """SNR over a bandwidth share, given the SNR measured over the whole band."""
    return quality + 10.0 * math.log10(total_bandwidth / share)


def evaluate_handover(serving: str, quality: Mapping[str, float], margin: float) -> str | None:
    """Target AP if some neighbour beats the serving AP by more than ``margin`` dB."""
    current = quality.get(serving, -math.inf)
    candidates = [(q, ap) for ap, q in quality.items() if ap != serving]
    if not candidates:
        return None
    best_q = max(q for q, _ in candidates)
    best = min(ap for q, ap in candidates if q == best_q)
    return best if best_q > current + margin else None


class AccessPoint(Reactive):
    def __init__(self, spec: ApSpec, amf_id: str, sdn_id: str, xh_rate: float = 10e9,
                 xh_power: float = 30.0, dl_table: McsTable = DOWNLINK_TABLE,
                 ul_table: McsTable = UPLINK_TABLE):
        super().__init__(spec.id)
        if spec.strategy not in BANDWIDTH_STRATEGIES:
            raise ValueError(f"unknown bandwidth strategy {spec.strategy!r}")
        self.spec = spec
        self.id = spec.id
        self.amf_id = amf_id
        self.sdn_id = sdn_id
        self.xh_rate = xh_rate
        self.xh_power = xh_power
        self.dl_table = dl_table
        self.ul_table = ul_table
        self.share = BANDWIDTH_STRATEGIES[spec.strategy]

        self.radio_in = self.add_in_port("radio_in")
        self.radio_out = self.add_out_port("radio_out")
        self.xh_in = self.add_in_port("xh_in")
        self.xh_out = self.add_out_port("xh_out")

        self.bandwidth: dict[str, float] = {}  # connected UEs
        self.quality: dict[str, float] = {}
        self.ul_rx: dict[str, float] = {}  # last uplink received power, dBm
        self.ul_mcs: dict[str, McsEntry] = {}
        self.dl_mcs: dict[str, McsEntry] = {}
        self.configs: dict[str, RadioConfig] = {}
        self._dirty: set[str] = set()  # UEs whose radio config may have changed
        self.pending_access: dict[str, tuple[float, float]] = {}
        self.handover_out: dict[str, str] = {}
        self.handover_in: dict[str, str] = {}
        self.forward: dict[str, str] = {}
        self.held: dict[str, list] = defaultdict(list)
        self.routes: dict[str, tuple[str, ...]] = {}
        self.waiting_queries: list[EdcQuery] = []
        self.handovers = 0

    @property
    def connected(self) -> set[str]:
        return set(self.bandwidth)

    def initialize(self) -> None:
        self.after(self.spec.pss_period, self._pss)

    # -- transmission helpers --------------------------------------------
    def _control(self, ue: str, message, channel: Channel = Channel.PDCCH) -> None:
        s = self.spec
        self.send(self.radio_out, PhysicalPacket(
            message, s.control_size, s.tx_power, s.control_bandwidth,
            self.dl_table.lowest.spectral_efficiency, s.carrier, s.id, ue, channel, sent_at=self.now))

    def _data(self, ue: str, message) -> None:
        s = self.spec
        size = getattr(message, "size", s.control_size)
        self.send(self.radio_out, PhysicalPacket(
            message, size, s.tx_power, self.bandwidth[ue], self.dl_mcs[ue].spectral_efficiency,
            s.carrier, s.id, ue, Channel.PDSCH, sent_at=self.now))

    def _crosshaul(self, destination: str, message) -> None:
        size = message.size if isinstance(message, ServiceRequest) else self.spec.control_size
        self.send(self.xh_out, PhysicalPacket(
            message, size, self.xh_power, self.xh_rate, 1.0, self.spec.carrier, self.spec.id,
            destination, Channel.XH_UP, sent_at=self.now))

    def _pss(self) -> None:
        s = self.spec
        self.send(self.radio_out, PhysicalPacket(
            Pss(s.id, s.location, s.bandwidth), s.control_size, s.tx_power, s.control_bandwidth,
            self.dl_table.lowest.spectral_efficiency, s.carrier, s.id, BROADCAST, Channel.PBCH,
            sent_at=self.now))
        self.after(s.pss_period, self._pss)

    # -- resources ------------------------------------------------------------
    def _reassign(self) -> None:
        shares = self.share(self.spec.bandwidth, sorted(self.bandwidth))
        for ue, bw in shares.items():
            if self.bandwidth[ue] != bw:
                self.bandwidth[ue] = bw
                self._dirty.add(ue)
                self.record("bandwidth", ue, "bandwidth_hz", bw, self.id)
            self._update_dl(ue)
            if ue in self.ul_rx:
                self.track_uplink_mcs(ue, self.ul_rx[ue])

    def _update_dl(self, ue: str) -> None:
        snr = downlink_snr(self.quality[ue], self.spec.bandwidth, self.bandwidth[ue])
        self._set_mcs(ue, self.dl_mcs, select_mcs(snr, self.dl_table), "dl_efficiency")

    def track_uplink_mcs(self, ue: str, rx_power: float) -> McsEntry:
        self.ul_rx[ue] = rx_power
        snr = snr_from_rx(rx_power, self.spec.temperature, self.bandwidth[ue])
        entry = select_mcs(snr, self.ul_table)
        self._set_mcs(ue, self.ul_mcs, entry, "ul_efficiency")
        return entry

    def _set_mcs(self, ue: str, table: dict, entry: McsEntry, metric: str) -> None:
        if table.get(ue) != entry:
            table[ue] = entry
            self._dirty.add(ue)
            self.record("mcs", ue, metric, entry.spectral_efficiency, self.id)

    def _push_config(self, ue: str) -> None:
        config = RadioConfig(ue, self.id, self.bandwidth[ue], self.bandwidth[ue],
                             self.ul_mcs[ue].spectral_efficiency, self.dl_mcs[ue].spectral_efficiency)
        if self.configs.get(ue) != config:
            previous = self.configs.get(ue)
            self.configs[ue] = config
            self._control(ue, config)
            for metric, bw, eff in (("ul_rate_bps", "ul_bandwidth", "ul_efficiency"),
                                    ("dl_rate_bps", "dl_bandwidth", "dl_efficiency")):
                rate = getattr(config, bw) * getattr(config, eff)
                if previous is None or rate != getattr(previous, bw) * getattr(previous, eff):
                    self.record("bandwidth", ue, metric, rate, self.id)

    def _push_configs(self) -> None:
        dirty, self._dirty = self._dirty, set()
        for ue in sorted(dirty):
            if ue in self.bandwidth:
                self._push_config(ue)

    def _admit(self, ue: str, quality: float, rx_power: float) -> None:
        self.forward.pop(ue, None)
        self.bandwidth[ue] = 0.0
        self.quality[ue] = quality
        self.record("access", ue, "attach", 1.0, self.id)
        self._reassign()
        self.track_uplink_mcs(ue, rx_power)

    def _release(self, ue: str) -> None:
        del self.bandwidth[ue]
        for table in (self.quality, self.ul_rx, self.ul_mcs, self.dl_mcs, self.configs):
            table.pop(ue, None)
        self.record("access", ue, "detach", 0.0, self.id)
        for metric in ("bandwidth_hz", "ul_rate_bps", "dl_rate_bps"):
            self.record("bandwidth", ue, metric, 0.0, self.id)
        if self.bandwidth:
            self._reassign()

    # -- radio side -------------------------------------------------------------
    def _on_radio(self, packet: PhysicalPacket) -> None:
        msg = packet.payload
        if isinstance(msg, AccessRequest):
            if msg.ue_id in self.bandwidth:
                self._control(msg.ue_id, AccessResponse(msg.ue_id, self.id, True))
                self.configs.pop(msg.ue_id, None)
                self._dirty.add(msg.ue_id)
            elif msg.ue_id not in self.pending_access:
                self.pending_access[msg.ue_id] = (msg.dl_quality, packet.rx_power)
                self._crosshaul(self.amf_id, AmfRequest(msg.ue_id, self.id))
        elif isinstance(msg, DisconnectRequest):
            if msg.ue_id in self.bandwidth:
                self._release(msg.ue_id)
        elif isinstance(msg, RrcReport):
            self._on_rrc(msg)
        elif isinstance(msg, HandoverAccess):
            self._on_handover_access(msg, packet.rx_power)
        elif isinstance(msg, EdcQuery):
            self._answer_query(msg)
        elif isinstance(msg, SERVICE_UPLINK):
            ue = msg.request_id.ue
            if ue in self.bandwidth:
                self.track_uplink_mcs(ue, packet.rx_power)
            self._crosshaul(msg.edc_id, _stamp(msg, self.id))
        else:
            raise SimulationFault(f"access point cannot handle {type(msg).__name__}", event=msg)

    def _on_rrc(self, report: RrcReport) -> None:
        ue = report.ue_id
        if ue not in self.bandwidth:
            return  # stale report from a UE that already left
        if self.id in report.quality:
            self.quality[ue] = report.quality[self.id]
            self._update_dl(ue)
        if ue not in self.handover_out:
            target = evaluate_handover(self.id, report.quality, self.spec.handover_margin)
            if target is not None:
                self.handover_out[ue] = target
                self._crosshaul(target, HandoverRequest(ue, self.id, target))

    def _on_handover_access(self, msg: HandoverAccess, rx_power: float) -> None:
        ue = msg.ue_id
        if ue in self.bandwidth:
            self._control(ue, HandoverComplete(ue, self.id))
            return
        if self.handover_in.pop(ue, None) is None:
            self.record("handover", ue, "unexpected_access", 1.0, self.id)
            return
        self._admit(ue, msg.dl_quality, rx_power)
        self.handovers += 1
        self.record("handover", ue, "completed", 1.0, self.id)
        self._control(ue, HandoverComplete(ue, self.id))
        self.configs.pop(ue, None)
        self._dirty.add(ue)
        for message in self.held.pop(ue, []):
            self._data(ue, message)

    def _answer_query(self, query: EdcQuery) -> None:
        ranked = self.routes.get(query.service)
        if not ranked:
            self.waiting_queries.append(query)
            return
        if query.ue_id in self.bandwidth:
            self._control(query.ue_id, EdcQueryResponse(query.ue_id, query.service, ranked[0]))

    # -- crosshaul side -------------------------------------------------------
    def _on_crosshaul(self, packet: PhysicalPacket) -> None:
        msg = packet.payload
        if isinstance(msg, AmfResponse):
            entry = self.pending_access.pop(msg.ue_id, None)
            if entry is None:
                return
            if msg.granted:
                self._admit(msg.ue_id, *entry)
            self._control(msg.ue_id, AccessResponse(msg.ue_id, self.id, msg.granted))
        elif isinstance(msg, SdnTableUpdate):
            self.routes.update(msg.table)
            waiting, self.waiting_queries = self.waiting_queries, []
            for query in waiting:
                self._answer_query(query)
        elif isinstance(msg, HandoverRequest):
            accepted = msg.ue_id not in self.bandwidth
            if accepted:
                self.handover_in[msg.ue_id] = msg.source
            self._crosshaul(msg.source, HandoverResponse(msg.ue_id, msg.source, self.id, accepted))
        elif isinstance(msg, HandoverResponse):
            ue = msg.ue_id
            if self.handover_out.get(ue) != msg.target:
                return
            del self.handover_out[ue]
            if not msg.accepted or ue not in self.bandwidth:
                self.record("handover", ue, "rejected", 1.0, msg.target)
                return
            # release before the target admits: never two serving APs at once
            self._release(ue)
            self.forward[ue] = msg.target
            self._control(ue, HandoverCommand(ue, self.id, msg.target))
        elif isinstance(msg, SERVICE_DOWNLINK):
            self._downlink(msg)
        else:
            raise SimulationFault(f"access point cannot handle {type(msg).__name__}", event=msg)

    def route_service(self, message) -> None:
        self._downlink(message)

    def _downlink(self, msg) -> None:
        ue = msg.request_id.ue
        if ue in self.bandwidth:
            self._data(ue, msg)
        elif ue in self.handover_in:
            self.held[ue].append(msg)
        elif ue in self.forward:
            self._crosshaul(self.forward[ue], msg)
        else:
            self.record("sessions", ue, "undeliverable", 1.0, str(msg.request_id))

    def on_input(self) -> None:
        for packet in self.xh_in.values:
            self._on_crosshaul(packet)
        for packet in self.radio_in.values:
            self._on_radio(packet)
        self._push_configs()


def _stamp(message, ap_id: str):
    return replace(message, ap_id=ap_id)
