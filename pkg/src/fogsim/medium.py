"""Transmission media: the five-channel radio interface and the crosshaul."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .base import Reactive
from .devs import Port, SimulationFault
from .messages import Location
from .mobility import Geometry
from .radio import (BROADCAST, Channel, PhysicalPacket, distance, path_loss, propagation_delay,
                    received_power, transmission_delay)


@dataclass(frozen=True)
class Tune:
    """A UE turning its broadcast receiver on or off."""

    ue_id: str
    listening: bool


@dataclass(frozen=True)
class Delivery:
    start: float  # transmission start once the link is free
    arrival: float
    rx_power: float


def crosshaul_transmit(packet: PhysicalPacket, link_distance: float, now: float = 0.0,
                       link_free_at: float = 0.0,
                       attenuation: Callable[[float, float], float] = path_loss) -> Delivery:
    """Delivery of ``packet`` over one point-to-point crosshaul link."""
    start = max(now, link_free_at)
    tx = transmission_delay(packet.size, packet.rate)
    loss = attenuation(link_distance, packet.carrier_frequency)
    return Delivery(start, start + tx + propagation_delay(link_distance), packet.tx_power - loss)


class _Medium(Reactive):
    """Shared machinery: per-link FIFO serialization and timed delivery."""

    def __init__(self, name: str):
        super().__init__(name)
        self.links_free_at: dict[tuple, float] = {}
        self.outputs: dict[str, Port] = {}
        self.sent = 0
        self.delivered = 0

    def attach(self, node: str) -> Port:
        port = self.add_out_port(f"to_{node}")
        self.outputs[node] = port
        return port

    def _deliver(self, packet: PhysicalPacket) -> None:
        port = self.outputs.get(packet.destination)
        if port is None:
            raise SimulationFault(f"unknown destination {packet.destination!r}", event=packet)
        self.delivered += 1
        self.send(port, packet)


class Crosshaul(_Medium):
    """Star-topology transport between APs, EDCs and core functions.

    Uplink (from APs) and downlink (towards APs) are independent FDD
    channels; each (channel, source, destination) link is FIFO.
    """

    def __init__(self, name: str, locations: Mapping[str, Location],
                 attenuation: Callable[[float, float], float] = path_loss):
        super().__init__(name)
        self.locations = dict(locations)
        self.attenuation = attenuation
        self.inbox = self.add_in_port("inbox")
        for node in sorted(self.locations):
            self.attach(node)

    def on_input(self) -> None:
        for packet in self.inbox.values:
            if packet.destination not in self.locations:
                raise SimulationFault(f"crosshaul has no route to {packet.destination!r}",
                                      event=packet)
            self.sent += 1
            key = (packet.channel, packet.source, packet.destination)
            d = distance(self.locations[packet.source], self.locations[packet.destination])
            delivery = crosshaul_transmit(packet, d, self.now, self.links_free_at.get(key, 0.0),
                                          self.attenuation)
            self.links_free_at[key] = delivery.start + transmission_delay(packet.size, packet.rate)
            self.at(delivery.arrival, self._deliver, packet.delivered(delivery.rx_power))


class RadioInterface(_Medium):
    """Radio medium between APs and UEs.

    Packets are serialized per (channel, source, destination) link at the
    rate stamped on them, then delivered after the propagation delay with
    the received power filled in.  PBCH broadcasts reach only UEs whose
    receiver is tuned in.
    """

    def __init__(self, name: str, geometry: Geometry, loss_model: Callable[[float, float], float] = path_loss):
        super().__init__(name)
        self.geometry = geometry
        self.loss_model = loss_model
        self.from_aps = self.add_in_port("from_aps")
        self.from_ues = self.add_in_port("from_ues")
        self.tune = self.add_in_port("tune")
        self.listening: set[str] = set()
        nodes = set(geometry.fixed) | set(geometry.traces)
        for node in sorted(nodes):
            self.attach(node)

    def _propagate(self, packet: PhysicalPacket, receiver: str, start_tx: float, tx: float) -> None:
        # geometry is sampled when the transmission starts
        src = self.geometry.locate(packet.source, start_tx)
        dst = self.geometry.locate(receiver, start_tx)
        d = distance(src, dst)
        rx = received_power(packet.tx_power, self.geometry.gain(packet.source),
                            self.geometry.gain(receiver), self.loss_model(d, packet.carrier_frequency))
        arrival = start_tx + tx + propagation_delay(d)
        self.at(arrival, self._deliver, packet.delivered(rx, receiver))

    def _transmit(self, packet: PhysicalPacket) -> None:
        self.sent += 1
        key = (packet.channel, packet.source, packet.destination)
        start = max(self.now, self.links_free_at.get(key, 0.0))
        tx = transmission_delay(packet.size, packet.rate)
        self.links_free_at[key] = start + tx
        if packet.destination == BROADCAST:
            if packet.channel is not Channel.PBCH:
                raise SimulationFault("broadcast outside PBCH", event=packet)
            for ue in sorted(self.listening):
                self._propagate(packet, ue, start, tx)
        else:
            if packet.destination not in self.outputs:
                raise SimulationFault(f"unknown radio node {packet.destination!r}", event=packet)
            self._propagate(packet, packet.destination, start, tx)

    def on_input(self) -> None:
        for tune in self.tune.values:
            if tune.listening:
                self.listening.add(tune.ue_id)
            else:
                self.listening.discard(tune.ue_id)
        for packet in self.from_aps.values:
            if packet.channel.is_uplink:
                raise SimulationFault("AP transmitting on an uplink channel", event=packet)
            self._transmit(packet)
        for packet in self.from_ues.values:
            if not packet.channel.is_uplink:
                raise SimulationFault("UE transmitting on a downlink channel", event=packet)
            self._transmit(packet)
