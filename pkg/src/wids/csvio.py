"""CSV intermediate representation of parsed frames.

One row per frame, one column per extracted attribute, using the dissector
attribute names as the header.  The column list is a fixed contract: readers
reject any deviation so that silently re-ordered or truncated exports never
reach the detectors.  Times are microseconds since the epoch.

The schema carries no retransmission flag, so the reader re-derives it: a
row whose (source, sequence number) repeats the previously accepted row
from that source is flagged as a retry.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

from .errors import SchemaMismatch
from .frames import (
    AKM_SAE,
    AUTH_ALG_SAE,
    SUBTYPE_ASSOC_REQ,
    SUBTYPE_ASSOC_RESP,
    SUBTYPE_AUTH,
    SUBTYPE_BEACON,
    SUBTYPE_DEAUTH,
    SUBTYPE_DISASSOC,
    SUBTYPE_PROBE_RESP,
    TYPE_DATA,
    TYPE_MANAGEMENT,
    AssocReqBody,
    AssocRespBody,
    AuthBody,
    BeaconBody,
    DeauthBody,
    EapolKeyBody,
    FrameRecord,
    RsnInfo,
)

log = logging.getLogger(__name__)

COLUMNS = [
    "frame.number",
    "frame.time",
    "wlan.sa",
    "wlan.ra",
    "wlan.bssid",
    "wlan.seq",
    "wlan.fc.type",
    "wlan.fc.subtype",
    "wlan.fixed.beacon",
    "wlan.fixed.timestamp",
    "wlan.ssid",
    "wlan.rsn.akms.count",
    "wlan.rsn.akms.type",
    "wlan.fixed.auth.alg",
    "wlan.fixed.auth_seq",
    "wlan.fixed.status_code",
    "wlan.fixed.sae_message_type",
    "wlan.fixed.finite_cyclic_group",
    "wlan.fixed.aid",
    "wlan.fixed.reason_code",
    "eapol.keydes.type",
    "wlan_rsna_eapol.keydes.msgnr",
]


@dataclass
class CsvStats:
    frames: int = 0
    malformed_rows: int = 0


def _s(value) -> str:
    return "" if value is None else str(value)


def frame_to_row(frame: FrameRecord) -> list[str]:
    body = frame.body
    beacon_interval = tsf = ssid = None
    akm_count = akm_types = None
    auth_alg = auth_seq = status = sae_msg = group = None
    aid = reason = keydes = msgnr = None

    if isinstance(body, BeaconBody):
        tsf = body.tsf_timestamp
        beacon_interval = body.beacon_interval
        ssid = body.ssid
        if body.rsn is not None:
            akm_count = body.rsn.akm_count
            akm_types = ",".join(str(t) for t in body.rsn.akm_types)
    elif isinstance(body, AuthBody):
        auth_alg = body.auth_alg
        auth_seq = body.auth_seq
        status = body.status_code
        sae_msg = body.sae_message_type
        group = body.sae_group
    elif isinstance(body, AssocReqBody):
        ssid = body.ssid
        if body.rsn is not None:
            akm_count = body.rsn.akm_count
            akm_types = ",".join(str(t) for t in body.rsn.akm_types)
    elif isinstance(body, AssocRespBody):
        status = body.status_code
        aid = body.aid
    elif isinstance(body, DeauthBody):
        reason = body.reason_code
    elif isinstance(body, EapolKeyBody):
        keydes = body.descriptor_type
        msgnr = body.message_nr

    return [
        _s(frame.frame_number), _s(frame.ts_us),
        _s(frame.source_addr), _s(frame.receiver_addr), _s(frame.bssid),
        _s(frame.seq_num), _s(frame.frame_type), _s(frame.subtype),
        _s(beacon_interval), _s(tsf), _s(ssid),
        _s(akm_count), _s(akm_types),
        _s(auth_alg), _s(auth_seq), _s(status), _s(sae_msg), _s(group),
        _s(aid), _s(reason), _s(keydes), _s(msgnr),
    ]


def write_csv(frames: Iterable[FrameRecord], dest: str | Path | TextIO) -> None:
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            write_csv(frames, fh)
        return
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(COLUMNS)
    for frame in frames:
        writer.writerow(frame_to_row(frame))


def _int(cell: str) -> int | None:
    return int(cell) if cell else None


def _rsn_from_cells(count: str, types: str) -> RsnInfo | None:
    if not count and not types:
        return None
    akms = tuple(int(t) for t in types.split(",")) if types else ()
    # the column set carries no MFP bits; infer them from the AKM mix the
    # way certification mandates (SAE-only: required, transition: capable)
    has_sae = AKM_SAE in akms
    return RsnInfo(
        akm_count=int(count) if count else len(akms),
        akm_types=akms,
        mfp_capable=has_sae,
        mfp_required=has_sae and len(akms) == 1,
    )


def _row_to_frame(row: dict[str, str], is_retry: bool) -> FrameRecord:
    ftype = int(row["wlan.fc.type"])
    subtype = int(row["wlan.fc.subtype"])
    body = None
    if ftype == TYPE_MANAGEMENT:
        if subtype in (SUBTYPE_BEACON, SUBTYPE_PROBE_RESP):
            body = BeaconBody(
                tsf_timestamp=_int(row["wlan.fixed.timestamp"]) or 0,
                beacon_interval=_int(row["wlan.fixed.beacon"]) or 0,
                ssid=row["wlan.ssid"] or None,
                rsn=_rsn_from_cells(row["wlan.rsn.akms.count"], row["wlan.rsn.akms.type"]),
            )
        elif subtype == SUBTYPE_AUTH:
            body = AuthBody(
                auth_alg=_int(row["wlan.fixed.auth.alg"]) or 0,
                auth_seq=_int(row["wlan.fixed.auth_seq"]) or 0,
                status_code=_int(row["wlan.fixed.status_code"]) or 0,
                sae_group=_int(row["wlan.fixed.finite_cyclic_group"]),
            )
        elif subtype == SUBTYPE_ASSOC_REQ:
            body = AssocReqBody(
                ssid=row["wlan.ssid"] or None,
                rsn=_rsn_from_cells(row["wlan.rsn.akms.count"], row["wlan.rsn.akms.type"]),
            )
        elif subtype == SUBTYPE_ASSOC_RESP:
            body = AssocRespBody(
                status_code=_int(row["wlan.fixed.status_code"]) or 0,
                aid=_int(row["wlan.fixed.aid"]) or 0,
            )
        elif subtype in (SUBTYPE_DEAUTH, SUBTYPE_DISASSOC):
            body = DeauthBody(reason_code=_int(row["wlan.fixed.reason_code"]) or 0)
    elif ftype == TYPE_DATA and row["eapol.keydes.type"]:
        body = EapolKeyBody(
            descriptor_type=int(row["eapol.keydes.type"]),
            message_nr=_int(row["wlan_rsna_eapol.keydes.msgnr"]) or 0,
        )
    return FrameRecord(
        frame_number=int(row["frame.number"]),
        ts_us=int(row["frame.time"]),
        frame_type=ftype,
        subtype=subtype,
        source_addr=row["wlan.sa"] or None,
        receiver_addr=row["wlan.ra"] or None,
        bssid=row["wlan.bssid"] or None,
        seq_num=_int(row["wlan.seq"]),
        is_retry=is_retry,
        body=body,
    )


def read_csv(source: str | Path | TextIO) -> tuple[list[FrameRecord], CsvStats]:
    """Read frames from the CSV representation.

    Raises SchemaMismatch when the header deviates from COLUMNS in any way.
    Rows that fail to parse are counted and skipped.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", newline="") as fh:
            return read_csv(fh)
    stats = CsvStats()
    reader = csv.reader(source)
    header = next(reader, None)
    if header != COLUMNS:
        raise SchemaMismatch(f"expected the {len(COLUMNS)}-column attribute "
                             f"header, got {header!r}")
    frames: list[FrameRecord] = []
    last_seq: dict[str, int] = {}
    for cells in reader:
        if len(cells) != len(COLUMNS):
            stats.malformed_rows += 1
            continue
        row = dict(zip(COLUMNS, cells))
        try:
            sa, seq_cell = row["wlan.sa"], row["wlan.seq"]
            seq = int(seq_cell) if seq_cell else None
            is_retry = bool(sa) and seq is not None and last_seq.get(sa) == seq
            frame = _row_to_frame(row, is_retry)
        except (ValueError, KeyError):
            stats.malformed_rows += 1
            continue
        if sa and seq is not None and not is_retry:
            last_seq[sa] = seq
        frames.append(frame)
    stats.frames = len(frames)
    return frames, stats
