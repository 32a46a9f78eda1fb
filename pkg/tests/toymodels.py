"""Small atomics used by the kernel tests."""
from collections import deque

from fogsim.devs import INFINITY, Atomic, Coupled


class Generator(Atomic):
    def __init__(self, name, period, limit=None):
        super().__init__(name)
        self.period = period
        self.limit = limit
        self.fired = 0
        self.outputs = 0
        self.out = self.add_out_port("out")

    def time_advance(self):
        if self.limit is not None and self.fired >= self.limit:
            return INFINITY
        return self.period

    def output(self):
        self.outputs += 1
        self.out.add(f"{self.name}#{self.fired + 1}")

    def internal_transition(self):
        self.fired += 1


class Processor(Atomic):
    """FIFO server with a fixed service time."""

    def __init__(self, name, service):
        super().__init__(name)
        self.service = service
        self.queue = deque()
        self.remaining = INFINITY
        self.inp = self.add_in_port("in")
        self.out = self.add_out_port("out")

    def time_advance(self):
        return self.remaining

    def output(self):
        self.out.add(self.queue[0])

    def internal_transition(self):
        self.queue.popleft()
        self.remaining = self.service if self.queue else INFINITY

    def external_transition(self, elapsed):
        if self.queue:
            self.remaining -= elapsed
        self.queue.extend(self.inp.values)
        if self.remaining == INFINITY and self.queue:
            self.remaining = self.service


class Collector(Atomic):
    def __init__(self, name):
        super().__init__(name)
        self.seen = []
        self.inp = self.add_in_port("in")

    def external_transition(self, elapsed):
        self.seen.extend((self.now, v) for v in self.inp.values)


class Counter(Atomic):
    """Periodic model that also counts how each transition was entered."""

    def __init__(self, name, period):
        super().__init__(name)
        self.period = period
        self.calls = {"internal": 0, "external": 0, "confluent": 0, "output": 0}
        self.inp = self.add_in_port("in")
        self.out = self.add_out_port("out")
        self.sigma = period

    def time_advance(self):
        return self.sigma

    def output(self):
        self.calls["output"] += 1
        self.out.add(self.now)

    def internal_transition(self):
        self.calls["internal"] += 1
        self.sigma = self.period

    def external_transition(self, elapsed):
        self.calls["external"] += 1
        self.sigma -= elapsed

    def confluent_transition(self):
        self.calls["confluent"] += 1
        self.sigma = self.period


def pipeline(period=1.0, service=1.5, jobs=3):
    root = Coupled("top")
    gen = root.add_component(Generator("gen", period, jobs))
    proc = root.add_component(Processor("proc", service))
    sink = root.add_component(Collector("sink"))
    root.add_coupling(gen.out, proc.inp)
    root.add_coupling(proc.out, sink.inp)
    return root, gen, proc, sink


class Script(Atomic):
    """Emits pre-scheduled values: ``[(time, value), ...]`` sorted by time."""

    def __init__(self, name, schedule):
        super().__init__(name)
        self.schedule = deque(sorted(schedule, key=lambda e: e[0]))
        self.out = self.add_out_port("out")

    def time_advance(self):
        return self.schedule[0][0] - self.now if self.schedule else INFINITY

    def output(self):
        t = self.schedule[0][0]
        while self.schedule and self.schedule[0][0] == t:
            self.out.add(self.schedule.popleft()[1])

    def internal_transition(self):
        pass
