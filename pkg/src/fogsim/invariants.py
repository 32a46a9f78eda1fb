"""Checks over transducer records, shared by the test-suite and the scripts."""
from __future__ import annotations

from collections import Counter, defaultdict
from itertools import groupby
from typing import Iterable

from .base import TransducerRecord

COLD_MIN = 1.2  # power-on plus session start, s
WARM_MIN, WARM_MAX = 0.2, 1.0


def off_power_violations(records: Iterable[TransducerRecord]) -> list[TransducerRecord]:
    """PU power samples taken while the unit is OFF that are not exactly zero."""
    return [r for r in records
            if r.stream == "pu" and r.metric == "power_w" and r.ref == "OFF" and r.value != 0.0]


def attachment_violations(records: Iterable[TransducerRecord]) -> list[tuple[float, str, set]]:
    """Instants at which some UE is attached to more than one AP, or a UE
    reporting CONNECTED is not attached to the AP it names."""
    attached: dict[str, set[str]] = defaultdict(set)
    bad = []
    records = list(records)
    for t, group in groupby(records, key=lambda r: r.time):
        claims = []
        for r in group:
            if r.stream != "access":
                continue
            if r.metric == "attach":
                attached[r.entity].add(r.ref)
            elif r.metric == "detach":
                attached[r.entity].discard(r.ref)
            elif r.metric == "state" and r.value == 1.0:
                claims.append((r.entity, r.ref.split(":", 1)[1]))
        for ue, aps in attached.items():
            if len(aps) > 1:
                bad.append((t, ue, set(aps)))
        for ue, ap in claims:
            if attached[ue] != {ap}:
                bad.append((t, ue, set(attached[ue])))
    return bad


def session_balance(records: Iterable[TransducerRecord]) -> dict[str, int]:
    counts = Counter(r.metric for r in records if r.stream == "sessions")
    return {
        "create_requests": counts["create_request"],
        "create_responses": counts["create_granted"] + counts["create_rejected"],
        "opened": counts["dispatch_cold"] + counts["dispatch_warm"] + counts["dispatch_warming"],
        "closed": counts["session_closed"],
        "remove_requests": counts["remove_request"],
        "remove_responses": counts["remove_response"],
    }


def creation_delays(records: Iterable[TransducerRecord]) -> list[tuple[str, str, float]]:
    """(request id, dispatch temperature, creation delay) per dispatched session."""
    records = list(records)
    temperature = {r.ref: r.metric.removeprefix("dispatch_") for r in records
                   if r.stream == "sessions" and r.metric.startswith("dispatch_")}
    return [(r.ref, temperature[r.ref], r.value) for r in records
            if r.stream == "delay" and r.metric == "create" and r.ref in temperature]


def cold_start_violations(records: Iterable[TransducerRecord]) -> list[tuple[str, str, float]]:
    bad = []
    for rid, temp, delay in creation_delays(records):
        if temp == "cold" and delay < COLD_MIN:
            bad.append((rid, temp, delay))
        elif temp == "warm" and not WARM_MIN <= delay < WARM_MAX:
            bad.append((rid, temp, delay))
    return bad
