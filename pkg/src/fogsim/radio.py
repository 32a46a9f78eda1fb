"""Physical-layer arithmetic shared by the radio interface and the crosshaul.

All power quantities are in dB/dBm, bandwidths in Hz, times in seconds.
"""
from __future__ import annotations

import csv
import enum
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, Protocol, Sequence

from .devs import ConfigurationError

log = logging.getLogger(__name__)

SPEED_OF_LIGHT = 299_792_458.0  # m/s
BOLTZMANN = 1.380649e-23  # J/K
BROADCAST = "*"


class LinkStalled(Exception):
    """Raised when a link has no usable rate; the caller must hold the message."""


class Channel(enum.Enum):
    PBCH = "pbch"
    PUCCH = "pucch"
    PDCCH = "pdcch"
    PUSCH = "pusch"
    PDSCH = "pdsch"
    # crosshaul FDD pair
    XH_UP = "xh_up"
    XH_DOWN = "xh_down"

    @property
    def is_control(self) -> bool:
        return self in (Channel.PBCH, Channel.PUCCH, Channel.PDCCH)

    @property
    def is_uplink(self) -> bool:
        return self in (Channel.PUCCH, Channel.PUSCH, Channel.XH_UP)


@dataclass(frozen=True)
class PhysicalPacket:
    payload: Any
    size: float  # bits
    tx_power: float  # dBm
    bandwidth: float  # Hz
    spectral_efficiency: float  # bps/Hz
    carrier_frequency: float  # Hz
    source: str
    destination: str
    channel: Channel
    # filled in by the medium on delivery
    rx_power: float | None = None
    sent_at: float | None = None

    def __post_init__(self):
        if self.size < 0:
            raise ValueError(f"packet size must be non-negative, got {self.size}")
        if self.bandwidth < 0 or self.spectral_efficiency < 0:
            raise ValueError("bandwidth and spectral efficiency must be non-negative")

    @property
    def rate(self) -> float:
        return bit_rate(self.bandwidth, self.spectral_efficiency)

    def delivered(self, rx_power: float, destination: str | None = None) -> "PhysicalPacket":
        """Copy stamped with the received power (and receiver, for broadcasts)."""
        # fields were validated on construction; skip __post_init__ on this hot path
        copy = object.__new__(PhysicalPacket)
        copy.__dict__.update(self.__dict__)
        copy.__dict__["rx_power"] = rx_power
        if destination is not None:
            copy.__dict__["destination"] = destination
        return copy


@dataclass(frozen=True)
class LinkBudget:
    tx_power: float
    carrier_frequency: float
    distance: float
    bandwidth: float
    tx_gain: float = 0.0
    rx_gain: float = 0.0
    noise_temperature: float = 300.0

    def __post_init__(self):
        if self.distance < 0:
            raise ValueError("distance must be non-negative")
        if self.noise_temperature <= 0:
            raise ValueError("noise temperature must be positive")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")


# --------------------------------------------------------------------------
# propagation and noise

_FSPL_CONSTANT = 20.0 * math.log10(4.0 * math.pi / SPEED_OF_LIGHT)


def path_loss(distance: float, carrier_frequency: float) -> float:
    """Free-space path loss in dB, floored at 0 dB."""
    if distance < 0 or carrier_frequency <= 0:
        raise ValueError("distance must be >= 0 and frequency > 0")
    if distance == 0:
        log.debug("co-located transmitter and receiver, path loss floored at 0 dB")
        return 0.0
    loss = 20.0 * math.log10(distance) + 20.0 * math.log10(carrier_frequency) + _FSPL_CONSTANT
    return max(loss, 0.0)


class PathLossModel(Protocol):
    def __call__(self, distance: float, carrier_frequency: float) -> float: ...


def noise_power(temperature: float, bandwidth: float) -> float:
    """Thermal noise k*T*B in dBm."""
    if temperature <= 0 or bandwidth <= 0:
        raise ValueError("temperature and bandwidth must be positive")
    return 10.0 * math.log10(BOLTZMANN * temperature * bandwidth / 1e-3)


def received_power(tx_power: float, tx_gain: float, rx_gain: float, loss: float) -> float:
    return tx_power + tx_gain + rx_gain - loss


def snr(budget: LinkBudget, loss_model: PathLossModel = path_loss) -> float:
    loss = loss_model(budget.distance, budget.carrier_frequency)
    rx = received_power(budget.tx_power, budget.tx_gain, budget.rx_gain, loss)
    return rx - noise_power(budget.noise_temperature, budget.bandwidth)


def snr_from_rx(rx_power: float, temperature: float, bandwidth: float) -> float:
    return rx_power - noise_power(temperature, bandwidth)


# --------------------------------------------------------------------------
# modulation and coding

@dataclass(frozen=True, order=True)
class McsEntry:
    index: int
    name: str = field(compare=False)
    min_snr: float = field(compare=False)
    spectral_efficiency: float = field(compare=False)


def shannon_min_snr(efficiency: float) -> float:
    """Smallest SNR (dB) whose Shannon capacity reaches ``efficiency``."""
    return 10.0 * math.log10(2.0 ** efficiency - 1.0)


class McsTable(Sequence[McsEntry]):
    def __init__(self, name: str, entries: Iterable[McsEntry]):
        self.name = name
        self.entries = tuple(entries)
        if not self.entries:
            raise ConfigurationError(f"MCS table {name!r} is empty")
        for previous, current in zip(self.entries, self.entries[1:]):
            if not (current.min_snr > previous.min_snr
                    and current.spectral_efficiency > previous.spectral_efficiency):
                raise ConfigurationError(
                    f"MCS table {name!r} not strictly increasing at entry {current.index}")

    def __getitem__(self, item):
        return self.entries[item]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def top(self) -> McsEntry:
        return self.entries[-1]

    @property
    def lowest(self) -> McsEntry:
        return self.entries[0]

    @classmethod
    def from_efficiencies(cls, name: str, rows: Iterable[tuple[int, str, float]]) -> "McsTable":
        return cls(name, [McsEntry(i, label, shannon_min_snr(eff), eff) for i, label, eff in rows])

    @classmethod
    def from_csv(cls, path: str | Path, name: str | None = None) -> "McsTable":
        """Read ``index,name,min_snr_db,efficiency_bps_hz`` rows."""
        path = Path(path)
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            expected = {"index", "name", "min_snr_db", "efficiency_bps_hz"}
            if reader.fieldnames is None or not expected <= set(reader.fieldnames):
                raise ConfigurationError(f"{path}: expected columns {sorted(expected)}")
            entries = [McsEntry(int(row["index"]), row["name"], float(row["min_snr_db"]),
                                float(row["efficiency_bps_hz"])) for row in reader]
        return cls(name or path.stem, entries)

    def to_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "name", "min_snr_db", "efficiency_bps_hz"])
            for e in self.entries:
                writer.writerow([e.index, e.name, repr(e.min_snr), repr(e.spectral_efficiency)])


# NR PDSCH table topping out at 64QAM.  MCS 17 (2.5664) is dropped because its
# efficiency is below MCS 16 (2.5703), which would break monotonicity.
_NR_64QAM = [
    (0, "QPSK-120", 0.2344), (1, "QPSK-157", 0.3066), (2, "QPSK-193", 0.3770),
    (3, "QPSK-251", 0.4902), (4, "QPSK-308", 0.6016), (5, "QPSK-379", 0.7402),
    (6, "QPSK-449", 0.8770), (7, "QPSK-526", 1.0273), (8, "QPSK-602", 1.1758),
    (9, "QPSK-679", 1.3262), (10, "16QAM-340", 1.3281), (11, "16QAM-378", 1.4766),
    (12, "16QAM-434", 1.6953), (13, "16QAM-490", 1.9141), (14, "16QAM-553", 2.1602),
    (15, "16QAM-616", 2.4063), (16, "16QAM-658", 2.5703),
    (18, "64QAM-466", 2.7305), (19, "64QAM-517", 3.0293), (20, "64QAM-567", 3.3223),
    (21, "64QAM-616", 3.6094), (22, "64QAM-666", 3.9023), (23, "64QAM-719", 4.2129),
    (24, "64QAM-772", 4.5234), (25, "64QAM-822", 4.8164), (26, "64QAM-873", 5.1152),
    (27, "64QAM-910", 5.3320), (28, "64QAM-948", 5.5547),
]

# NR table topping out at 256QAM
_NR_256QAM = [
    (0, "QPSK-120", 0.2344), (1, "QPSK-193", 0.3770), (2, "QPSK-308", 0.6016),
    (3, "QPSK-449", 0.8770), (4, "QPSK-602", 1.1758), (5, "16QAM-378", 1.4766),
    (6, "16QAM-434", 1.6953), (7, "16QAM-490", 1.9141), (8, "16QAM-553", 2.1602),
    (9, "16QAM-616", 2.4063), (10, "16QAM-658", 2.5703), (11, "64QAM-466", 2.7305),
    (12, "64QAM-517", 3.0293), (13, "64QAM-567", 3.3223), (14, "64QAM-616", 3.6094),
    (15, "64QAM-666", 3.9023), (16, "64QAM-719", 4.2129), (17, "64QAM-772", 4.5234),
    (18, "64QAM-822", 4.8164), (19, "64QAM-873", 5.1152), (20, "256QAM-682.5", 5.3320),
    (21, "256QAM-711", 5.5547), (22, "256QAM-754", 5.8906), (23, "256QAM-797", 6.2266),
    (24, "256QAM-841", 6.5703), (25, "256QAM-885", 6.9141), (26, "256QAM-916.5", 7.1602),
    (27, "256QAM-948", 7.4063),
]

DOWNLINK_TABLE = McsTable.from_efficiencies("nr-64qam", _NR_64QAM)
UPLINK_TABLE = McsTable.from_efficiencies("nr-256qam", _NR_256QAM)
BUILTIN_TABLES = {DOWNLINK_TABLE.name: DOWNLINK_TABLE, UPLINK_TABLE.name: UPLINK_TABLE}


def select_mcs(snr_db: float, table: Sequence[McsEntry]) -> McsEntry:
    """Best entry whose threshold is at or below ``snr_db``; the lowest entry otherwise."""
    if not table:
        raise ConfigurationError("empty MCS table")
    lo, hi = 0, len(table)
    # thresholds are sorted, so bisect for the last qualifying entry
    while lo < hi:
        mid = (lo + hi) // 2
        if table[mid].min_snr <= snr_db:
            lo = mid + 1
        else:
            hi = mid
    return table[lo - 1] if lo > 0 else table[0]


# --------------------------------------------------------------------------
# bandwidth sharing and rates

BandwidthStrategy = Callable[[float, Iterable[str]], dict[str, float]]


def share_bandwidth(total: float, connected: Iterable[str]) -> dict[str, float]:
    """Split ``total`` evenly among the connected UEs."""
    if total < 0:
        raise ValueError("total bandwidth must be non-negative")
    ues = sorted(set(connected))
    if not ues:
        return {}
    share = total / len(ues)
    return {ue: share for ue in ues}


BANDWIDTH_STRATEGIES: dict[str, BandwidthStrategy] = {"even": share_bandwidth}


def bit_rate(bandwidth: float, efficiency: float) -> float:
    if bandwidth < 0 or efficiency < 0:
        raise ValueError("bandwidth and efficiency must be non-negative")
    return bandwidth * efficiency


def transmission_delay(size: float, rate: float) -> float:
    if size == 0:
        return 0.0
    if rate <= 0:
        raise LinkStalled(f"cannot send {size} bits at rate {rate}")
    return size / rate


def propagation_delay(distance: float) -> float:
    return distance / SPEED_OF_LIGHT


def distance(a: Sequence[float], b: Sequence[float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def load_table(ref: str | Path, base: Path | None = None) -> McsTable:
    """Resolve a built-in table name or a CSV path."""
    ref = str(ref)
    if ref in BUILTIN_TABLES:
        return BUILTIN_TABLES[ref]
    path = Path(ref)
    if base is not None and not path.is_absolute():
        path = base / path
    if not path.exists():
        raise ConfigurationError(f"unknown MCS table {ref!r}")
    return McsTable.from_csv(path)


def describe(table: McsTable) -> list[Mapping[str, Any]]:
    return [dict(index=e.index, name=e.name, min_snr_db=e.min_snr,
                 efficiency_bps_hz=e.spectral_efficiency) for e in table]
