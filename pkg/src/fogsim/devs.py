"""Parallel DEVS modelling primitives and a sequential coordinator.

Atomic models implement the usual four functions (time advance, internal,
external and output) plus an optional confluent function.  Coupled models
aggregate atomics and other coupled models through explicit port couplings.
The coordinator flattens the coupling graph once, then advances simulation
time by collecting the outputs of every imminent model before any of them
transitions.

Models hold no references to the coordinator, so a different coordinator
(threaded, distributed) can drive the same model tree unchanged.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Any, Iterable, Iterator

INFINITY = math.inf


class ConfigurationError(Exception):
    """Invalid model structure, detected before the simulation starts."""


class SimulationFault(Exception):
    """A model reached an undefined (state, input) combination."""

    def __init__(self, message: str, path: str | None = None,
                 time: float | None = None, event: Any = None):
        self.path = path
        self.time = time
        self.event = event
        where = []
        if path is not None:
            where.append(f"model={path}")
        if time is not None:
            where.append(f"t={time!r}")
        if event is not None:
            where.append(f"event={event!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class Port:
    """A named input or output port holding a bag of values."""

    __slots__ = ("name", "parent", "is_input", "values")

    def __init__(self, name: str, parent: "Model", is_input: bool):
        self.name = name
        self.parent = parent
        self.is_input = is_input
        self.values: list[Any] = []

    def add(self, value: Any) -> None:
        self.values.append(value)

    def extend(self, values: Iterable[Any]) -> None:
        self.values.extend(values)

    def clear(self) -> None:
        self.values.clear()

    @property
    def empty(self) -> bool:
        return not self.values

    @property
    def path(self) -> str:
        return f"{self.parent.path}.{self.name}"

    def __repr__(self) -> str:
        kind = "in" if self.is_input else "out"
        return f"<Port {kind} {self.path}>"


class Model:
    def __init__(self, name: str):
        if not name or "." in name:
            raise ConfigurationError(f"invalid model name {name!r}")
        self.name = name
        self.parent: Coupled | None = None
        self.in_ports: dict[str, Port] = {}
        self.out_ports: dict[str, Port] = {}

    @property
    def path(self) -> str:
        if self.parent is None:
            return self.name
        return f"{self.parent.path}.{self.name}"

    def add_in_port(self, name: str) -> Port:
        if name in self.in_ports:
            raise ConfigurationError(f"duplicate input port {name!r} on {self.path}")
        port = Port(name, self, True)
        self.in_ports[name] = port
        return port

    def add_out_port(self, name: str) -> Port:
        if name in self.out_ports:
            raise ConfigurationError(f"duplicate output port {name!r} on {self.path}")
        port = Port(name, self, False)
        self.out_ports[name] = port
        return port


class Atomic(Model):
    """Behaviour contract for an atomic model.

    Subclasses override ``time_advance``, ``internal_transition``,
    ``external_transition`` and ``output``.  Inputs are read from the bags of
    the model's input ports during an external or confluent transition;
    outputs are added to output ports inside ``output``.

    ``now`` is set by the coordinator to the current simulation time right
    before any transition or output call.
    """

    def __init__(self, name: str):
        super().__init__(name)
        self.now = 0.0
        self.time_last = 0.0
        self.time_next = INFINITY

    def initialize(self) -> None:
        pass

    def time_advance(self) -> float:
        return INFINITY

    def internal_transition(self) -> None:
        pass

    def external_transition(self, elapsed: float) -> None:
        pass

    def confluent_transition(self) -> None:
        self.internal_transition()
        self.external_transition(0.0)

    def output(self) -> None:
        pass

    def exit(self) -> None:
        pass

    def iter_atomics(self) -> Iterator["Atomic"]:
        yield self


class Coupled(Model):
    def __init__(self, name: str):
        super().__init__(name)
        self.components: list[Model] = []
        self._names: set[str] = set()
        # (source port, destination port)
        self.couplings: list[tuple[Port, Port]] = []

    def add_component(self, model: Model) -> Model:
        if model.name in self._names:
            raise ConfigurationError(f"duplicate component {model.name!r} in {self.path}")
        if model.parent is not None:
            raise ConfigurationError(f"{model.path} already belongs to a coupled model")
        model.parent = self
        self.components.append(model)
        self._names.add(model.name)
        return model

    def add_coupling(self, source: Port, destination: Port) -> None:
        src_owner, dst_owner = source.parent, destination.parent
        if src_owner is self:
            if not source.is_input:
                raise ConfigurationError(f"coupling from own output port {source.path}")
        elif src_owner.parent is self:
            if source.is_input:
                raise ConfigurationError(f"coupling from component input port {source.path}")
        else:
            raise ConfigurationError(f"{source.path} is not visible from {self.path}")
        if dst_owner is self:
            if destination.is_input:
                raise ConfigurationError(f"coupling into own input port {destination.path}")
            if src_owner is self:
                raise ConfigurationError(f"direct feed-through {source.path} -> {destination.path}")
        elif dst_owner.parent is self:
            if not destination.is_input:
                raise ConfigurationError(
                    f"output-to-output coupling {source.path} -> {destination.path}")
            if dst_owner is src_owner:
                raise ConfigurationError(f"self-loop on {dst_owner.path}")
        else:
            raise ConfigurationError(f"{destination.path} is not visible from {self.path}")
        self.couplings.append((source, destination))

    def iter_atomics(self) -> Iterator[Atomic]:
        for component in self.components:
            yield from component.iter_atomics()


@dataclass(frozen=True)
class LogRecord:
    time: float
    port: str
    value: Any


class EventLog:
    """Chronological record of output events."""

    def __init__(self) -> None:
        self.records: list[LogRecord] = []

    def append(self, time: float, port: str, value: Any) -> None:
        if self.records and time < self.records[-1].time:
            raise SimulationFault("event log time went backwards", time=time)
        self.records.append(LogRecord(time, port, value))

    def __iter__(self) -> Iterator[LogRecord]:
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, index):
        return self.records[index]

    def times(self) -> list[float]:
        return [r.time for r in self.records]

    def filter(self, port: str) -> list[LogRecord]:
        return [r for r in self.records if r.port == port]


class Coordinator:
    """Sequential Parallel-DEVS coordinator.

    ``trace`` selects what goes to the event log: ``"all"`` records every
    atomic output, ``"root"`` only values leaving the root model's output
    ports, ``"none"`` nothing.
    """

    def __init__(self, root: Model, trace: str = "all", max_steps_per_instant: int = 1_000_000):
        if trace not in ("all", "root", "none"):
            raise ValueError(f"unknown trace mode {trace!r}")
        self.root = root
        self.trace = trace
        self.max_steps_per_instant = max_steps_per_instant
        self.atomics: list[Atomic] = sorted(root.iter_atomics(), key=lambda m: m.path)
        self._routes: dict[Port, tuple[list[Port], list[Port]]] = {}
        self._heap: list[tuple[float, int, Atomic]] = []
        self.time = 0.0
        self.log = EventLog()
        self._initialized = False
        self._validate(root)
        self._build_routes()

    # -- structure -----------------------------------------------------
    def _validate(self, model: Model) -> None:
        seen_paths = set()
        for atomic in self.atomics:
            if atomic.path in seen_paths:
                raise ConfigurationError(f"duplicate model path {atomic.path}")
            seen_paths.add(atomic.path)
        stack = [model]
        while stack:
            current = stack.pop()
            if isinstance(current, Coupled):
                for source, destination in current.couplings:
                    for port in (source, destination):
                        owner = port.parent
                        ports = owner.in_ports if port.is_input else owner.out_ports
                        if ports.get(port.name) is not port:
                            raise ConfigurationError(f"coupling references unknown port {port.path}")
                stack.extend(current.components)

    def _targets(self, port: Port, acc_in: list[Port], acc_root: list[Port], seen: set) -> None:
        """Follow couplings from ``port`` down to atomic inputs or root outputs."""
        if port in seen:
            raise ConfigurationError(f"coupling cycle through {port.path}")
        seen = seen | {port}
        owner = port.parent
        if port.is_input:
            if isinstance(owner, Atomic):
                acc_in.append(port)
                return
            scope = owner
        else:
            if owner is self.root:
                acc_root.append(port)
                return
            scope = owner.parent
            if scope is None:
                return
        for source, destination in scope.couplings:
            if source is port:
                self._targets(destination, acc_in, acc_root, seen)

    def _build_routes(self) -> None:
        # models are identified by their rank in path order from here on
        self._outputs: list[list[tuple[Port, list[Port], list[str]]]] = []
        for order, atomic in enumerate(self.atomics):
            atomic._order = order
            atomic._path = atomic.path
            routes = []
            for port in atomic.out_ports.values():
                inputs: list[Port] = []
                roots: list[Port] = []
                self._targets(port, inputs, roots, set())
                # deterministic delivery order
                inputs.sort(key=lambda p: p.path)
                self._routes[port] = (inputs, roots)
                routes.append((port, inputs, [r.path for r in roots]))
            self._outputs.append(routes)

    # -- execution -----------------------------------------------------
    def _schedule(self, model: Atomic, time: float) -> None:
        ta = model.time_advance()
        if ta < 0 or ta != ta:
            raise SimulationFault(f"invalid time advance {ta!r}", model.path, time)
        model.time_last = time
        model.time_next = t_next = time + ta
        if t_next != INFINITY:
            heapq.heappush(self._heap, (t_next, model._order, model))

    def initialize(self) -> None:
        for model in self.atomics:
            model.now = 0.0
            model.initialize()
            self._schedule(model, 0.0)
        self._initialized = True

    def next_time(self) -> float:
        heap = self._heap
        while heap:
            t, _, model = heap[0]
            if model.time_next == t:
                return t
            heapq.heappop(heap)
        return INFINITY

    def _fault(self, model: Atomic, time: float, exc: Exception) -> SimulationFault:
        if isinstance(exc, SimulationFault):
            if exc.path is None:
                exc.path = model.path
                exc.time = time
                exc.args = (f"{exc.args[0]} (model={model.path}, t={time!r})",)
            return exc
        event = [v for p in model.in_ports.values() for v in p.values] or None
        fault = SimulationFault(f"{type(exc).__name__}: {exc}", model.path, time, event)
        fault.__cause__ = exc
        return fault

    def step(self) -> float:
        """Process every event at the next event time and return that time."""
        t = self.next_time()
        if t == INFINITY:
            return t
        heap = self._heap
        imminent: list[Atomic] = []
        # heap entries at equal time pop in path order; stale duplicates are adjacent
        while heap and heap[0][0] == t:
            model = heapq.heappop(heap)[2]
            if model.time_next == t and (not imminent or imminent[-1] is not model):
                imminent.append(model)

        trace = self.trace
        log = self.log
        influenced: dict[int, Atomic] = {}
        for model in imminent:
            model.now = t
            try:
                model.output()
            except Exception as exc:  # noqa: BLE001 - re-raised with context
                raise self._fault(model, t, exc) from exc
            for port, inputs, roots in self._outputs[model._order]:
                values = port.values
                if not values:
                    continue
                if trace == "all":
                    path = port.path
                    for value in values:
                        log.append(t, path, value)
                elif roots and trace == "root":
                    for root_path in roots:
                        for value in values:
                            log.append(t, root_path, value)
                for destination in inputs:
                    destination.values.extend(values)
                    receiver = destination.parent
                    influenced[receiver._order] = receiver
                port.values = []

        active = {m._order: m for m in imminent}
        imminent_orders = set(active)
        active.update(influenced)
        for order in sorted(active):
            model = active[order]
            model.now = t
            try:
                if order in imminent_orders:
                    if order in influenced:
                        model.confluent_transition()
                    else:
                        model.internal_transition()
                else:
                    model.external_transition(t - model.time_last)
            except Exception as exc:  # noqa: BLE001 - re-raised with context
                raise self._fault(model, t, exc) from exc
            for port in model.in_ports.values():
                if port.values:
                    port.values = []
            self._schedule(model, t)
        self.time = t
        return t

    def simulate(self, until: float = INFINITY) -> EventLog:
        if not self._initialized:
            self.initialize()
        last = None
        same_instant = 0
        while True:
            t = self.next_time()
            if t == INFINITY or t > until:
                break
            if t == last:
                same_instant += 1
                if same_instant > self.max_steps_per_instant:
                    raise SimulationFault(f"more than {self.max_steps_per_instant} steps at one instant",
                                          time=t)
            else:
                same_instant = 0
            last = t
            self.step()
        return self.log

    def exit(self) -> None:
        for model in self.atomics:
            model.exit()


def simulate(root: Model, until: float = INFINITY, trace: str = "all") -> EventLog:
    """Run ``root`` from time 0 until no event is left at or before ``until``."""
    coordinator = Coordinator(root, trace=trace)
    log = coordinator.simulate(until)
    coordinator.exit()
    return log
