"""Small fog networks with hand-placed UEs."""
from fogsim.devs import Coordinator
from fogsim.mobility import MobilityTrace
from fogsim.run import collect
from fogsim.scenario import FogNetwork, parse_scenario


def scenario(aps=((-400.0, 0.0), (400.0, 0.0)), pus=4, duration=60.0, drain=20.0, app=None,
             allow="*", **edc):
    doc = {
        "name": "kit", "seed": 0, "duration": duration, "drain": drain,
        "aps": [{"id": f"ap_{i}", "location": list(loc)} for i, loc in enumerate(aps)],
        "edcs": [{"id": "edc_0", "location": [0.0, 0.0], "pus": pus, **edc}],
        "apps": [{"id": "app", "resource_share": 0.1, **(app or {})}],
        "ues": {"synthetic": {"n": 1, "area": [0, 0, 1, 1]}},
        "amf": {"allow": allow},
    }
    return parse_scenario(doc)


def static(ue_id, x, y=0.0):
    return MobilityTrace.static(ue_id, (x, y))


def run_network(scn, traces):
    network = FogNetwork(scn, traces)
    coordinator = Coordinator(network, trace="root")
    coordinator.simulate(until=scn.end)
    return network, collect(coordinator)


def select(records, stream, metric=None, entity=None):
    return [r for r in records if r.stream == stream
            and (metric is None or r.metric == metric)
            and (entity is None or r.entity == entity)]
