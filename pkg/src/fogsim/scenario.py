"""Scenario configuration: schema, validation and model assembly.

A scenario is a single JSON or TOML document.  Top-level tables:

``name``, ``seed``, ``duration`` (s, no new sessions after it), ``drain`` (s of
extra time for open sessions to close), ``radio``, ``crosshaul``, ``amf``,
``edge`` (defaults shared by every EDC), ``aps``, ``edcs``, ``apps`` and
``ues``.  See README for a full example.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import tomli

from .access import AccessPoint, ApSpec
from .core import Amf, AmfPolicy, SdnController
from .devs import ConfigurationError, Coupled
from .edge import (DISPATCH_STRATEGIES, POWER_MODELS, DvfsConfig, EdcSpec, EdgeDataCenter,
                   HardwarePolicy, check_dvfs)
from .medium import Crosshaul, RadioInterface
from .mobility import Geometry, MobilityTrace, read_traces, synthetic_traces
from .radio import BANDWIDTH_STRATEGIES, load_table
from .ue import ServiceConfig, UeSpec, UserEquipment

BUNDLED = {"sanfrancisco.toy": "sanfrancisco_toy.toml"}
AMF_ID = "amf"
SDN_ID = "sdn"


class ScenarioError(ConfigurationError):
    """Configuration problems; ``violations`` lists every one found."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass
class RadioConfig:
    carrier: float = 33e9
    pss_period: float = 0.1
    rrc_period: float = 1.0
    handover_margin: float = 3.0
    control_bandwidth: float = 10e6
    control_size: float = 1e3
    backoff: float = 1.0
    dl_table: str = "nr-64qam"
    ul_table: str = "nr-256qam"


@dataclass
class CrosshaulConfig:
    rate: float = 10e9
    tx_power: float = 30.0
    core_location: tuple[float, float] = (0.0, 0.0)


@dataclass
class UeConfig:
    traces: str | None = None
    synthetic: dict[str, Any] | None = None
    tx_power: float = 30.0
    gain: float = 0.0
    temperature: float = 300.0
    start_spread: float = 0.0  # UEs join uniformly within [0, start_spread)


@dataclass
class AppConfig:
    id: str
    resource_share: float = 0.1
    session_messages: int = 20
    request_period: float = 1.0
    message_size: float = 1e6
    create_timeout: float = 0.35
    idle_time: float = 1.0

    def service(self) -> ServiceConfig:
        return ServiceConfig(self.id, self.session_messages, self.request_period, self.message_size,
                             self.create_timeout, self.idle_time)


@dataclass
class Scenario:
    name: str
    seed: int
    duration: float
    drain: float
    radio: RadioConfig
    crosshaul: CrosshaulConfig
    amf: AmfPolicy
    aps: list[ApSpec]
    edcs: list[EdcSpec]
    apps: list[AppConfig]
    ues: UeConfig
    base: Path = field(default_factory=Path.cwd)

    @property
    def end(self) -> float:
        return self.duration + self.drain


# ---------------------------------------------------------------------------
# loading

def _read_document(path: Path) -> dict:
    text = path.read_text()
    if path.suffix == ".json":
        return json.loads(text)
    return tomli.loads(text)


def resolve(ref: str | Path) -> Path:
    """Path of a scenario file, accepting bundled scenario names."""
    if str(ref) in BUNDLED:
        return Path(str(resources.files("fogsim") / "data" / BUNDLED[str(ref)]))
    return Path(ref)


def load_scenario(ref: str | Path, overrides: Mapping[str, Any] | None = None) -> Scenario:
    path = resolve(ref)
    if not path.exists():
        raise ScenarioError([f"scenario file {path} not found"])
    try:
        doc = _read_document(path)
    except (ValueError, tomli.TOMLDecodeError) as exc:
        raise ScenarioError([f"{path}: {exc}"]) from exc
    doc.update(overrides or {})
    return parse_scenario(doc, base=path.parent)


def _build(cls, data: Any, where: str, errors: list[str], **extra):
    if not isinstance(data, Mapping):
        errors.append(f"{where}: expected a table")
        return None
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        errors.append(f"{where}: unknown keys {unknown}")
    kwargs = {k: v for k, v in data.items() if k in names}
    kwargs.update(extra)
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        errors.append(f"{where}: {exc}")
        return None


def _positive(errors: list[str], where: str, **values) -> None:
    for name, value in values.items():
        if not isinstance(value, (int, float)) or not value > 0:
            errors.append(f"{where}.{name} must be positive, got {value!r}")


def _location(errors, where, value):
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(v, (int, float)) for v in value)):
        errors.append(f"{where}.location must be [x, y] in metres")
        return (0.0, 0.0)
    return (float(value[0]), float(value[1]))


def _dvfs(errors, where, rows) -> tuple[DvfsConfig, ...] | None:
    try:
        table = tuple(DvfsConfig(int(r["index"]), float(r["max_utilization"]), tuple(r["power"]))
                      for r in rows)
        check_dvfs(table)
        return table
    except (KeyError, TypeError, ValueError, ConfigurationError) as exc:
        errors.append(f"{where}.dvfs: {exc}")
        return None


def parse_scenario(doc: Mapping[str, Any], base: Path | None = None) -> Scenario:
    """Validate a scenario document, collecting every violation before failing."""
    errors: list[str] = []
    doc = dict(doc)
    name = doc.pop("name", "scenario")
    seed = doc.pop("seed", 0)
    duration = doc.pop("duration", 600.0)
    drain = doc.pop("drain", 60.0)
    if not isinstance(seed, int):
        errors.append("seed must be an integer")
    _positive(errors, "scenario", duration=duration)
    if not isinstance(drain, (int, float)) or drain < 0:
        errors.append("drain must be non-negative")

    radio = _build(RadioConfig, doc.pop("radio", {}), "radio", errors)
    if radio is not None:
        _positive(errors, "radio", carrier=radio.carrier, pss_period=radio.pss_period,
                  rrc_period=radio.rrc_period, control_bandwidth=radio.control_bandwidth,
                  control_size=radio.control_size, backoff=radio.backoff)
        for key in ("dl_table", "ul_table"):
            try:
                load_table(getattr(radio, key), base)
            except ConfigurationError as exc:
                errors.append(f"radio.{key}: {exc}")
    xh = _build(CrosshaulConfig, doc.pop("crosshaul", {}), "crosshaul", errors)
    if xh is not None:
        _positive(errors, "crosshaul", rate=xh.rate)
        xh.core_location = _location(errors, "crosshaul.core", xh.core_location)
    amf_doc = doc.pop("amf", {})
    amf = AmfPolicy.from_config(amf_doc.get("allow", "*") if isinstance(amf_doc, Mapping) else None)

    aps = []
    for i, row in enumerate(doc.pop("aps", [])):
        where = f"aps[{i}]"
        row = dict(row)
        loc = _location(errors, where, row.pop("location", None))
        if radio is not None:
            for key in ("carrier", "pss_period", "handover_margin", "control_bandwidth", "control_size"):
                row.setdefault(key, getattr(radio, key))
        ap = _build(ApSpec, row, where, errors, location=loc)
        if ap is None:
            continue
        _positive(errors, where, bandwidth=ap.bandwidth, temperature=ap.temperature)
        if ap.strategy not in BANDWIDTH_STRATEGIES:
            errors.append(f"{where}.strategy: unknown {ap.strategy!r}")
        aps.append(ap)
    if not aps:
        errors.append("at least one AP is required")

    edge_defaults = dict(doc.pop("edge", {}))
    edcs = []
    for i, row in enumerate(doc.pop("edcs", [])):
        where = f"edcs[{i}]"
        row = {**edge_defaults, **row}
        loc = _location(errors, where, row.pop("location", None))
        dvfs_rows = row.pop("dvfs", None)
        edc = _build(EdcSpec, row, where, errors, location=loc)
        if edc is None:
            continue
        if dvfs_rows is not None:
            edc.dvfs = _dvfs(errors, where, dvfs_rows) or edc.dvfs
        if not isinstance(edc.pus, int) or edc.pus < 1:
            errors.append(f"{where}.pus must be a positive integer")
        if edc.dispatch not in DISPATCH_STRATEGIES:
            errors.append(f"{where}.dispatch: unknown strategy {edc.dispatch!r}")
        if edc.hardware not in {p.value for p in HardwarePolicy}:
            errors.append(f"{where}.hardware: unknown policy {edc.hardware!r}")
        if edc.power_model not in POWER_MODELS:
            errors.append(f"{where}.power_model: unknown {edc.power_model!r}")
        edcs.append(edc)
    if not edcs:
        errors.append("at least one EDC is required")

    apps = []
    for i, row in enumerate(doc.pop("apps", [])):
        app = _build(AppConfig, row, f"apps[{i}]", errors)
        if app is None:
            continue
        if not 0 < app.resource_share <= 1:
            errors.append(f"apps[{i}].resource_share must be in (0, 1]")
        try:
            app.service()
        except ValueError as exc:
            errors.append(f"apps[{i}]: {exc}")
        apps.append(app)

    ues = _build(UeConfig, doc.pop("ues", {}), "ues", errors)
    if ues is not None and (ues.traces is None) == (ues.synthetic is None):
        errors.append("ues: give exactly one of 'traces' or 'synthetic'")

    ids = [a.id for a in aps] + [e.id for e in edcs] + [AMF_ID, SDN_ID]
    dupes = sorted({x for x in ids if ids.count(x) > 1})
    if dupes:
        errors.append(f"duplicate node ids {dupes}")
    for key in sorted(doc):
        errors.append(f"unknown top-level key {key!r}")
    if errors:
        raise ScenarioError(errors)
    return Scenario(name, seed, float(duration), float(drain), radio, xh, amf, aps, edcs, apps, ues,
                    base or Path.cwd())


# ---------------------------------------------------------------------------
# assembly

def scenario_traces(scenario: Scenario) -> list[MobilityTrace]:
    cfg = scenario.ues
    if cfg.traces is not None:
        path = Path(cfg.traces)
        if not path.is_absolute():
            path = scenario.base / path
        if not path.exists():
            path = Path(str(resources.files("fogsim") / "data" / cfg.traces))
        return read_traces(path)
    syn = dict(cfg.synthetic)
    syn.setdefault("duration", scenario.end)
    syn.setdefault("seed", scenario.seed)
    syn["area"] = tuple(syn["area"])
    if "speed" in syn:
        syn["speed"] = tuple(syn["speed"])
    return synthetic_traces(**syn)


def ue_start_times(scenario: Scenario, ue_ids: list[str]) -> dict[str, float]:
    rng = random.Random(scenario.seed)
    spread = scenario.ues.start_spread
    return {ue: (rng.uniform(0.0, spread) if spread > 0 else 0.0) for ue in ue_ids}


class FogNetwork(Coupled):
    """The whole system: UEs, APs, EDCs, core functions and both media."""

    def __init__(self, scenario: Scenario, traces: list[MobilityTrace] | None = None):
        super().__init__("fog")
        self.scenario = scenario
        s = scenario
        if traces is None:
            traces = scenario_traces(s)
        self.traces = traces
        self.records = self.add_out_port("records")
        dl_table = load_table(s.radio.dl_table, s.base)
        ul_table = load_table(s.radio.ul_table, s.base)
        link = dict(tx_power=s.crosshaul.tx_power, rate=s.crosshaul.rate, carrier=s.radio.carrier,
                    control_size=s.radio.control_size)

        geometry = Geometry({ap.id: ap.location for ap in s.aps}, {tr.ue_id: tr for tr in traces},
                            {ap.id: ap.gain for ap in s.aps})
        for tr in traces:
            geometry.gains[tr.ue_id] = s.ues.gain
        locations = {ap.id: ap.location for ap in s.aps}
        locations.update({edc.id: edc.location for edc in s.edcs})
        locations[AMF_ID] = locations[SDN_ID] = s.crosshaul.core_location

        self.radio = self._add(RadioInterface("radio", geometry))
        self.crosshaul = self._add(Crosshaul("crosshaul", locations))
        self.amf = self._add(Amf(AMF_ID, s.amf, **link))
        self.sdn = self._add(SdnController(SDN_ID, {e.id: e.location for e in s.edcs},
                                           {a.id: a.location for a in s.aps},
                                           [app.id for app in s.apps], **link))
        for core in (self.amf, self.sdn):
            self._crosshaul_node(core.node_id, core.xh_out, core.xh_in)

        shares = {app.id: app.resource_share for app in s.apps}
        self.edcs = []
        for spec in s.edcs:
            edc = self._add(EdgeDataCenter(spec, shares, SDN_ID, **link))
            self._crosshaul_node(spec.id, edc.xh_out, edc.xh_in)
            self.edcs.append(edc)

        self.aps = []
        for spec in s.aps:
            ap = self._add(AccessPoint(spec, AMF_ID, SDN_ID, s.crosshaul.rate, s.crosshaul.tx_power,
                                       dl_table, ul_table))
            self._crosshaul_node(spec.id, ap.xh_out, ap.xh_in)
            self.add_coupling(ap.radio_out, self.radio.from_aps)
            self.add_coupling(self.radio.outputs[spec.id], ap.radio_in)
            self.aps.append(ap)

        starts = ue_start_times(s, [tr.ue_id for tr in traces])
        services = [app.service() for app in s.apps]
        self.ues = []
        for tr in traces:
            spec = UeSpec(tr.ue_id, s.ues.tx_power, s.ues.gain, s.ues.temperature, s.radio.carrier,
                          s.radio.control_bandwidth, s.radio.control_size, s.radio.pss_period,
                          s.radio.rrc_period, s.radio.backoff)
            ue = self._add(UserEquipment(spec, services, stop=s.duration, start=starts[tr.ue_id]))
            self.add_coupling(ue.radio_out, self.radio.from_ues)
            self.add_coupling(ue.tune, self.radio.tune)
            self.add_coupling(self.radio.outputs[tr.ue_id], ue.radio_in)
            self.ues.append(ue)

    def _add(self, model):
        self.add_component(model)
        self.add_coupling(model.records, self.records)
        return model

    def _crosshaul_node(self, node: str, out_port, in_port) -> None:
        self.add_coupling(out_port, self.crosshaul.inbox)
        self.add_coupling(self.crosshaul.outputs[node], in_port)


# hardware policy and dispatch strategy of the two reference set-ups
EXPERIMENTS = {
    "I": ("always_on", "minimum"),
    "II": ("power_off_idle", "maximum"),
}


def with_strategy(scenario: Scenario, hardware: str, dispatch: str) -> Scenario:
    """Copy of ``scenario`` with every EDC using the given policy and strategy."""
    return replace(scenario, edcs=[replace(e, hardware=hardware, dispatch=dispatch)
                                   for e in scenario.edcs])


def experiment(scenario: Scenario, name: str) -> Scenario:
    return with_strategy(scenario, *EXPERIMENTS[name])
