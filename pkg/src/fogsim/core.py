"""Core network functions: access control (AMF) and the SDN controller."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, Iterable, Mapping

from .base import Reactive
from .devs import SimulationFault
from .messages import AmfRequest, AmfResponse, EdcReport, Location, SdnTableUpdate
from .radio import Channel, PhysicalPacket, distance

WILDCARD = "*"


@dataclass(frozen=True)
class AmfPolicy:
    allowed: frozenset[str] | None = None  # None grants everybody

    @classmethod
    def from_config(cls, value) -> "AmfPolicy":
        if value is None or value == WILDCARD:
            return cls(None)
        return cls(frozenset(value))


def amf_check(ue_id: str, policy: AmfPolicy) -> bool:
    return policy.allowed is None or ue_id in policy.allowed


SdnTable = dict[tuple[str, str], tuple[str, ...]]


def sdn_update(reports: Iterable[EdcReport], edc_locations: Mapping[str, Location],
               ap_locations: Mapping[str, Location], apps: Collection[str] | None = None) -> SdnTable:
    """Rank EDCs per (AP, application): free ones by distance, full ones last."""
    reports = {r.edc_id: r for r in reports}
    if not reports:
        raise ValueError("SDN update needs at least one EDC report")
    if apps is None:
        apps = sorted({app for r in reports.values() for app in r.slots})
    table: SdnTable = {}
    for ap_id, ap_loc in sorted(ap_locations.items()):
        by_distance = sorted(reports, key=lambda e: (distance(ap_loc, edc_locations[e]), e))
        for app in apps:
            free = [e for e in by_distance if reports[e].slots.get(app, 0) > 0]
            full = [e for e in by_distance if reports[e].slots.get(app, 0) <= 0]
            table[(ap_id, app)] = tuple(free + full)
    return table


class _CoreFunction(Reactive):
    def __init__(self, name: str, node_id: str, tx_power: float, rate: float, carrier: float,
                 control_size: float):
        super().__init__(name)
        self.node_id = node_id
        self.tx_power = tx_power
        self.rate = rate
        self.carrier = carrier
        self.control_size = control_size
        self.xh_in = self.add_in_port("xh_in")
        self.xh_out = self.add_out_port("xh_out")

    def transmit(self, destination: str, message) -> None:
        self.send(self.xh_out, PhysicalPacket(message, self.control_size, self.tx_power, self.rate,
                                              1.0, self.carrier, self.node_id, destination,
                                              Channel.XH_DOWN, sent_at=self.now))


class Amf(_CoreFunction):
    def __init__(self, name: str, policy: AmfPolicy, **link):
        super().__init__(name, name, **link)
        self.policy = policy

    def on_input(self) -> None:
        for packet in self.xh_in.values:
            msg = packet.payload
            if not isinstance(msg, AmfRequest):
                raise SimulationFault(f"AMF cannot handle {type(msg).__name__}", event=msg)
            granted = amf_check(msg.ue_id, self.policy)
            self.record("access", msg.ue_id, "amf_granted" if granted else "amf_denied", 1.0, msg.ap_id)
            self.transmit(msg.ap_id, AmfResponse(msg.ue_id, msg.ap_id, granted))


class SdnController(_CoreFunction):
    """Recomputes the EDC ranking on every EDC status report."""

    def __init__(self, name: str, edc_locations: Mapping[str, Location],
                 ap_locations: Mapping[str, Location], apps: Collection[str], **link):
        super().__init__(name, name, **link)
        self.edc_locations = dict(edc_locations)
        self.ap_locations = dict(ap_locations)
        self.apps = sorted(apps)
        self.reports: dict[str, EdcReport] = {}
        self.table: SdnTable = {}

    def on_input(self) -> None:
        changed = False
        for packet in self.xh_in.values:
            msg = packet.payload
            if not isinstance(msg, EdcReport):
                raise SimulationFault(f"SDN controller cannot handle {type(msg).__name__}", event=msg)
            self.reports[msg.edc_id] = msg
            changed = True
        if not changed:
            return
        table = sdn_update(self.reports.values(), self.edc_locations, self.ap_locations, self.apps)
        for ap_id in sorted(self.ap_locations):
            rows = {app: table[(ap_id, app)] for app in self.apps}
            old = {app: self.table.get((ap_id, app)) for app in self.apps}
            if rows != old:
                self.transmit(ap_id, SdnTableUpdate(ap_id, rows))
        self.table = table
