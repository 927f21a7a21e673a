"""Link-layer independent view of captured 802.11 frames.

A FrameRecord is what the rest of the package works with: one record per
captured frame carrying addressing, sequencing, and the handful of fixed
fields and information elements the detectors need.  Parsers (pcap, csv)
produce FrameRecords; the detection engine and the synthesizer consume and
emit them.  Everything here is plain data: no I/O, no state.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

# 802.11 frame types (frame control, bits 2-3)
TYPE_MANAGEMENT = 0
TYPE_CONTROL = 1
TYPE_DATA = 2

# management subtypes (frame control, bits 4-7)
SUBTYPE_ASSOC_REQ = 0
SUBTYPE_ASSOC_RESP = 1
SUBTYPE_PROBE_REQ = 4
SUBTYPE_PROBE_RESP = 5
SUBTYPE_BEACON = 8
SUBTYPE_DISASSOC = 10
SUBTYPE_AUTH = 11
SUBTYPE_DEAUTH = 12

# authentication algorithms
AUTH_ALG_OPEN = 0
AUTH_ALG_SAE = 3

# SAE message sequence numbers (authentication transaction sequence)
SAE_COMMIT = 1
SAE_CONFIRM = 2

# status codes seen in authentication / association replies
STATUS_SUCCESS = 0x0000
STATUS_UNSPECIFIED_FAILURE = 0x0001
STATUS_UNSUPPORTED_GROUP = 0x004D

# reason code 7: class 3 frame received from nonassociated station
REASON_CLASS3_FROM_NONASSOC = 7

# AKM suite selector types under OUI 00-0F-AC
AKM_PSK = 2
AKM_SAE = 8

# cipher suite selector types under OUI 00-0F-AC
CIPHER_CCMP = 4

# Diffie-Hellman group registry: modulus size in bits, used only to order
# groups by strength when watching for group downgrades.  ECP groups 19-21
# and 25-26, Brainpool 27-30, MODP 1-18 and 22-24.
SAE_GROUP_MODULUS_BITS = {
    1: 768, 2: 1024, 5: 1536,
    14: 2048, 15: 3072, 16: 4096, 17: 6144, 18: 8192,
    19: 256, 20: 384, 21: 521,
    22: 1024, 23: 2048, 24: 2048,
    25: 192, 26: 224,
    27: 224, 28: 256, 29: 384, 30: 512,
}

# groups whose SAE password element derivation is not constant time
WEAK_SAE_GROUPS = frozenset({22, 23, 24, 27, 28, 29, 30})

BROADCAST = "ff:ff:ff:ff:ff:ff"

_MAC_RE = re.compile(r"^([0-9a-fA-F]{2})([:-]?)([0-9a-fA-F]{2})\2([0-9a-fA-F]{2})\2"
                     r"([0-9a-fA-F]{2})\2([0-9a-fA-F]{2})\2([0-9a-fA-F]{2})$")


def mac(value: str) -> str:
    """Normalize a MAC address to lowercase colon form. Raises ValueError."""
    m = _MAC_RE.match(value.strip())
    if not m:
        raise ValueError(f"not a MAC address: {value!r}")
    parts = [m.group(i) for i in (1, 3, 4, 5, 6, 7)]
    return ":".join(p.lower() for p in parts)


def mac_bytes(value: str) -> bytes:
    return bytes(int(b, 16) for b in mac(value).split(":"))


def mac_from_bytes(raw: bytes) -> str:
    if len(raw) != 6:
        raise ValueError(f"need 6 bytes, got {len(raw)}")
    return ":".join(f"{b:02x}" for b in raw)


@dataclass(frozen=True, slots=True)
class RsnInfo:
    """RSN element contents, reduced to what the detectors look at.

    akm_count is the count field as transmitted; akm_types are the parsed
    suite selectors.  Standard selectors (OUI 00-0F-AC) are stored as their
    type number (2 = PSK, 8 = SAE); foreign OUIs as (oui << 8) | type so
    they stay distinguishable.
    """

    akm_count: int
    akm_types: tuple[int, ...]
    pairwise_ciphers: tuple[int, ...] = (CIPHER_CCMP,)
    mfp_capable: bool = False
    mfp_required: bool = False

    @property
    def has_sae(self) -> bool:
        return AKM_SAE in self.akm_types


@dataclass(frozen=True, slots=True)
class BeaconBody:
    """Fixed fields and elements shared by beacons and probe responses."""

    tsf_timestamp: int          # AP timer at transmission, microseconds
    beacon_interval: int        # advertised interval in time units of 1024 us
    ssid: str | None
    rsn: RsnInfo | None


@dataclass(frozen=True, slots=True)
class AuthBody:
    auth_alg: int
    auth_seq: int
    status_code: int
    sae_group: int | None = None    # finite cyclic group, SAE commits only

    @property
    def sae_message_type(self) -> int | None:
        # commit/confirm numbering follows the transaction sequence field
        return self.auth_seq if self.auth_alg == AUTH_ALG_SAE else None


@dataclass(frozen=True, slots=True)
class AssocReqBody:
    ssid: str | None
    rsn: RsnInfo | None


@dataclass(frozen=True, slots=True)
class AssocRespBody:
    status_code: int
    aid: int


@dataclass(frozen=True, slots=True)
class DeauthBody:
    """Deauthentication and disassociation share this single-field body."""

    reason_code: int


@dataclass(frozen=True, slots=True)
class EapolKeyBody:
    message_nr: int             # position 1..4 in the 4-way handshake
    descriptor_type: int = 2    # RSN key descriptor


FrameBody = (
    BeaconBody | AuthBody | AssocReqBody | AssocRespBody | DeauthBody | EapolKeyBody
)


@dataclass(frozen=True, slots=True)
class FrameRecord:
    frame_number: int           # 1-based position in the capture
    ts_us: int                  # capture time, microseconds since the epoch
    frame_type: int
    subtype: int
    source_addr: str | None
    receiver_addr: str | None
    bssid: str | None
    seq_num: int | None
    is_retry: bool = False
    body: FrameBody | None = None
    rssi_dbm: int | None = None     # radiotap antenna signal; carried, unused

    @property
    def ssid(self) -> str | None:
        b = self.body
        if isinstance(b, (BeaconBody, AssocReqBody)):
            return b.ssid
        return None

    @property
    def rsn(self) -> RsnInfo | None:
        b = self.body
        if isinstance(b, (BeaconBody, AssocReqBody)):
            return b.rsn
        return None


class DispatchClass(Enum):
    """Routing classes for the detection engine, one per frame group."""

    ADVERTISEMENT = "advertisement"     # beacons and probe responses
    AUTHENTICATION = "authentication"
    ASSOCIATION = "association"         # requests and responses
    DEAUTH = "deauth"
    DISASSOC = "disassoc"
    EAPOL = "eapol"
    OTHER = "other"


_MGMT_CLASSES = {
    SUBTYPE_BEACON: DispatchClass.ADVERTISEMENT,
    SUBTYPE_PROBE_RESP: DispatchClass.ADVERTISEMENT,
    SUBTYPE_AUTH: DispatchClass.AUTHENTICATION,
    SUBTYPE_ASSOC_REQ: DispatchClass.ASSOCIATION,
    SUBTYPE_ASSOC_RESP: DispatchClass.ASSOCIATION,
    SUBTYPE_DEAUTH: DispatchClass.DEAUTH,
    SUBTYPE_DISASSOC: DispatchClass.DISASSOC,
}


def classify(frame: FrameRecord) -> DispatchClass:
    """Map a frame to its detector routing class. Total: never raises."""
    if frame.frame_type == TYPE_MANAGEMENT:
        return _MGMT_CLASSES.get(frame.subtype, DispatchClass.OTHER)
    if frame.frame_type == TYPE_DATA and isinstance(frame.body, EapolKeyBody):
        return DispatchClass.EAPOL
    return DispatchClass.OTHER


def is_connection_request(frame: FrameRecord, ap: str) -> bool:
    """True for an SAE commit directed at the protected AP.

    This is the unit both the flood and the timing detectors count: the
    first message of a new SAE handshake, client to AP.  Confirms and the
    AP's own replies never count.
    """
    body = frame.body
    return (
        isinstance(body, AuthBody)
        and body.auth_alg == AUTH_ALG_SAE
        and body.auth_seq == SAE_COMMIT
        and frame.receiver_addr == ap
        and frame.source_addr != ap
    )
