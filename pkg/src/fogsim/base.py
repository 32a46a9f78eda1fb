"""Agenda-driven atomic used by every network element of the fog model."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Any, Callable

from .devs import INFINITY, Atomic, Port


@dataclass(frozen=True)
class TransducerRecord:
    stream: str
    time: float
    entity: str
    metric: str
    value: float
    ref: str = ""


class Reactive(Atomic):
    """Atomic model driven by an internal agenda of timed callbacks.

    ``send`` queues an output to be emitted at the current instant (a zero
    time-advance internal step); ``at``/``after`` register callbacks fired by
    internal transitions.  Subclasses implement ``on_input`` to consume their
    input bags.
    """

    def __init__(self, name: str):
        super().__init__(name)
        self._agenda: list[tuple[float, int, Callable, tuple]] = []
        self._seq = 0
        self._outbox: list[tuple[Port, Any]] = []
        self.records = self.add_out_port("records")

    # -- scheduling helpers -------------------------------------------
    def at(self, time: float, callback: Callable, *args) -> int:
        self._seq += 1
        heapq.heappush(self._agenda, (time, self._seq, callback, args))
        return self._seq

    def after(self, delay: float, callback: Callable, *args) -> int:
        return self.at(self.now + delay, callback, *args)

    def cancel(self, token: int) -> None:
        self._agenda = [item for item in self._agenda if item[1] != token]
        heapq.heapify(self._agenda)

    def send(self, port: Port, value: Any) -> None:
        self._outbox.append((port, value))

    def record(self, stream: str, entity: str, metric: str, value: float, ref: str = "") -> None:
        self.send(self.records, TransducerRecord(stream, self.now, entity, metric, value, ref))

    # -- DEVS functions ------------------------------------------------
    def time_advance(self) -> float:
        if self._outbox:
            return 0.0
        if self._agenda:
            return max(self._agenda[0][0] - self.now, 0.0)
        return INFINITY

    def output(self) -> None:
        for port, value in self._outbox:
            port.add(value)

    def internal_transition(self) -> None:
        if self._outbox:
            self._outbox = []
            return
        agenda = self._agenda
        if not agenda:
            return
        due = max(agenda[0][0], self.now)
        fired = []
        while agenda and agenda[0][0] <= due:
            fired.append(heapq.heappop(agenda))
        for _, _, callback, args in fired:
            callback(*args)

    def external_transition(self, elapsed: float) -> None:
        self.on_input()

    def on_input(self) -> None:
        pass
