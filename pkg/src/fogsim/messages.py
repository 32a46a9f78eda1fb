"""Network-level message payloads carried inside physical packets."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

Location = tuple[float, float]


class RequestId(NamedTuple):
    ue: str
    service: str
    seq: int

    def __str__(self) -> str:
        return f"{self.ue}/{self.service}/{self.seq}"


# -- radio access ------------------------------------------------------

@dataclass(frozen=True)
class Pss:
    ap_id: str
    location: Location
    bandwidth: float


@dataclass(frozen=True)
class AccessRequest:
    ue_id: str
    ap_id: str
    dl_quality: float  # SNR of the AP's PSS, dB


@dataclass(frozen=True)
class AccessResponse:
    ue_id: str
    ap_id: str
    granted: bool


@dataclass(frozen=True)
class DisconnectRequest:
    ue_id: str
    ap_id: str


@dataclass(frozen=True)
class RrcReport:
    ue_id: str
    serving_ap: str
    quality: dict[str, float] = field(hash=False)


@dataclass(frozen=True)
class RadioConfig:
    """Per-UE radio resources decided by the serving AP."""

    ue_id: str
    ap_id: str
    ul_bandwidth: float
    dl_bandwidth: float
    ul_efficiency: float
    dl_efficiency: float


@dataclass(frozen=True)
class HandoverRequest:
    ue_id: str
    source: str
    target: str


@dataclass(frozen=True)
class HandoverResponse:
    ue_id: str
    source: str
    target: str
    accepted: bool


@dataclass(frozen=True)
class HandoverCommand:
    ue_id: str
    source: str
    target: str


@dataclass(frozen=True)
class HandoverAccess:
    ue_id: str
    target: str
    dl_quality: float


@dataclass(frozen=True)
class HandoverComplete:
    ue_id: str
    ap_id: str


# -- core network --------------------------------------------------------

@dataclass(frozen=True)
class AmfRequest:
    ue_id: str
    ap_id: str


@dataclass(frozen=True)
class AmfResponse:
    ue_id: str
    ap_id: str
    granted: bool


@dataclass(frozen=True)
class EdcReport:
    edc_id: str
    slots: dict[str, int] = field(hash=False)
    power: float = 0.0


@dataclass(frozen=True)
class SdnTableUpdate:
    ap_id: str
    table: dict[str, tuple[str, ...]] = field(hash=False)


# -- services --------------------------------------------------------------

@dataclass(frozen=True)
class EdcQuery:
    ue_id: str
    service: str


@dataclass(frozen=True)
class EdcQueryResponse:
    ue_id: str
    service: str
    edc_id: str


@dataclass(frozen=True)
class CreateSession:
    request_id: RequestId
    edc_id: str
    ap_id: str = ""


@dataclass(frozen=True)
class CreateSessionResponse:
    request_id: RequestId
    edc_id: str
    granted: bool
    ap_id: str = ""


@dataclass(frozen=True)
class ServiceRequest:
    request_id: RequestId
    edc_id: str
    size: float
    ap_id: str = ""


@dataclass(frozen=True)
class ServiceResponse:
    request_id: RequestId
    edc_id: str
    ok: bool
    ap_id: str = ""


@dataclass(frozen=True)
class RemoveSession:
    request_id: RequestId
    edc_id: str
    ap_id: str = ""


@dataclass(frozen=True)
class RemoveSessionResponse:
    request_id: RequestId
    edc_id: str
    ap_id: str = ""


SERVICE_UPLINK = (CreateSession, ServiceRequest, RemoveSession)
SERVICE_DOWNLINK = (CreateSessionResponse, ServiceResponse, RemoveSessionResponse)
