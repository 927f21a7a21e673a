"""Packet capture file I/O.

Reads classic pcap (both byte orders, microsecond and nanosecond variants)
and enough of pcapng to consume single-interface captures.  Link types
supported: 105 (bare 802.11) and 127 (radiotap, whose header is skipped via
its declared length after pulling out the FCS flag and antenna signal).

Writing always produces classic little-endian pcap with link type 105 and
no FCS, which keeps emitted traces trivially re-readable.
"""

from __future__ import annotations

import io
import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO

from . import dot11
from .errors import UnsupportedLinkType
from .frames import FrameRecord

log = logging.getLogger(__name__)

PCAP_MAGIC_US = 0xA1B2C3D4
PCAP_MAGIC_NS = 0xA1B23C4D
PCAPNG_MAGIC = 0x0A0D0D0A

LINKTYPE_IEEE802_11 = 105
LINKTYPE_RADIOTAP = 127

RADIOTAP_F_FCS = 0x10

# (size, alignment) of the leading radiotap fields, by present bit
_RADIOTAP_FIELDS = [
    (8, 8),  # 0 TSFT
    (1, 1),  # 1 flags
    (1, 1),  # 2 rate
    (4, 2),  # 3 channel
    (2, 2),  # 4 FHSS
    (1, 1),  # 5 dBm antenna signal
]


@dataclass
class IngestStats:
    frames: int = 0
    malformed_frames: int = 0
    malformed_bodies: int = 0
    skipped_interfaces: int = 0
    fcs_stripped: int = 0
    truncated: bool = False


def _parse_radiotap(data: bytes) -> tuple[int, bool, int | None]:
    """Return (payload offset, fcs present, rssi) for a radiotap frame."""
    if len(data) < 8 or data[0] != 0:
        raise ValueError("bad radiotap header")
    it_len = struct.unpack_from("<H", data, 2)[0]
    if it_len > len(data):
        raise ValueError("radiotap length overruns packet")
    words = []
    off = 4
    while True:
        if off + 4 > it_len:
            raise ValueError("radiotap present chain overruns header")
        word = struct.unpack_from("<I", data, off)[0]
        words.append(word)
        off += 4
        if not word & 0x80000000:
            break
    present = words[0]
    fcs = False
    rssi = None
    for bit, (size, align) in enumerate(_RADIOTAP_FIELDS):
        if not present & (1 << bit):
            continue
        off = (off + align - 1) // align * align
        if off + size > it_len:
            break
        if bit == 1:
            fcs = bool(data[off] & RADIOTAP_F_FCS)
        elif bit == 5:
            rssi = struct.unpack_from("<b", data, off)[0]
        off += size
    return it_len, fcs, rssi


def _decode_packet(data: bytes, link_type: int, number: int, ts_us: int,
                   last_seq: dict, stats: IngestStats) -> FrameRecord | None:
    rssi = None
    if link_type == LINKTYPE_RADIOTAP:
        try:
            skip, fcs, rssi = _parse_radiotap(data)
        except ValueError:
            stats.malformed_frames += 1
            return None
        data = data[skip:]
        if fcs and len(data) >= 4:
            data = data[:-4]
            stats.fcs_stripped += 1
    frame = dot11.decode_frame(data, number, ts_us, last_seq, stats, rssi_dbm=rssi)
    if frame is None:
        stats.malformed_frames += 1
    return frame


def _read_classic(fh: BinaryIO, stats: IngestStats) -> list[FrameRecord]:
    header = fh.read(24)
    if len(header) < 24:
        stats.truncated = True
        return []
    magic = struct.unpack_from("<I", header, 0)[0]
    if magic in (PCAP_MAGIC_US, PCAP_MAGIC_NS):
        endian = "<"
    else:
        magic = struct.unpack_from(">I", header, 0)[0]
        endian = ">"
    ns = magic == PCAP_MAGIC_NS
    link_type = struct.unpack_from(endian + "I", header, 20)[0]
    if link_type not in (LINKTYPE_IEEE802_11, LINKTYPE_RADIOTAP):
        raise UnsupportedLinkType(link_type)

    frames: list[FrameRecord] = []
    last_seq: dict[str, int] = {}
    number = 0
    while True:
        rec = fh.read(16)
        if not rec:
            break
        if len(rec) < 16:
            stats.truncated = True
            log.warning("capture truncated inside a record header")
            break
        ts_sec, ts_frac, incl_len, _orig = struct.unpack(endian + "IIII", rec)
        data = fh.read(incl_len)
        number += 1
        if len(data) < incl_len:
            stats.truncated = True
            log.warning("capture truncated inside packet %d", number)
            break
        ts_us = ts_sec * 1_000_000 + (ts_frac // 1000 if ns else ts_frac)
        frame = _decode_packet(data, link_type, number, ts_us, last_seq, stats)
        if frame is not None:
            frames.append(frame)
    stats.frames = len(frames)
    return frames


def _read_pcapng(fh: BinaryIO, stats: IngestStats) -> list[FrameRecord]:
    frames: list[FrameRecord] = []
    last_seq: dict[str, int] = {}
    endian = "<"
    link_type = None
    tsresol_us = 1  # timestamp units per microsecond numerator, see below
    ts_to_us = lambda t: t  # noqa: E731 - replaced once the IDB is seen
    number = 0
    n_interfaces = 0

    while True:
        head = fh.read(8)
        if len(head) < 8:
            if len(head):
                stats.truncated = True
            break
        btype = struct.unpack(endian + "I", head[:4])[0]
        if btype == PCAPNG_MAGIC:
            # new section: endianness comes from the byte-order magic
            rest = fh.read(4)
            if len(rest) < 4:
                stats.truncated = True
                break
            if struct.unpack("<I", rest)[0] == 0x1A2B3C4D:
                endian = "<"
            elif struct.unpack(">I", rest)[0] == 0x1A2B3C4D:
                endian = ">"
            else:
                stats.truncated = True
                break
            blen = struct.unpack(endian + "I", head[4:])[0]
            body = fh.read(blen - 12)
            n_interfaces = 0
            if len(body) < blen - 12:
                stats.truncated = True
                break
            continue
        blen = struct.unpack(endian + "I", head[4:])[0]
        if blen < 12 or blen % 4:
            stats.truncated = True
            break
        body = fh.read(blen - 12)
        if len(body) < blen - 12:
            stats.truncated = True
            log.warning("capture truncated inside block type %#x", btype)
            break
        fh.read(4)  # trailing block length copy

        if btype == 1:  # interface description
            n_interfaces += 1
            if n_interfaces > 1:
                continue  # only the first interface is analyzed
            link_type = struct.unpack_from(endian + "H", body, 0)[0]
            if link_type not in (LINKTYPE_IEEE802_11, LINKTYPE_RADIOTAP):
                raise UnsupportedLinkType(link_type)
            ts_to_us = _tsresol_converter(_pcapng_option(body[8:], 9, endian))
        elif btype == 6 and link_type is not None:  # enhanced packet
            iface, ts_hi, ts_lo, cap_len, _orig = struct.unpack_from(endian + "IIIII", body, 0)
            if iface != 0:
                stats.skipped_interfaces += 1
                continue
            data = body[20:20 + cap_len]
            number += 1
            ts_us = ts_to_us((ts_hi << 32) | ts_lo)
            frame = _decode_packet(data, link_type, number, ts_us, last_seq, stats)
            if frame is not None:
                frames.append(frame)
        elif btype == 3 and link_type is not None:  # simple packet, no timestamp
            orig_len = struct.unpack_from(endian + "I", body, 0)[0]
            data = body[4:4 + orig_len]
            number += 1
            frame = _decode_packet(data, link_type, number, 0, last_seq, stats)
            if frame is not None:
                frames.append(frame)
    stats.frames = len(frames)
    return frames


def _pcapng_option(options: bytes, code: int, endian: str) -> bytes | None:
    off = 0
    while off + 4 <= len(options):
        ocode, olen = struct.unpack_from(endian + "HH", options, off)
        if ocode == 0:
            break
        value = options[off + 4:off + 4 + olen]
        if ocode == code:
            return value
        off += 4 + (olen + 3) // 4 * 4
    return None


def _tsresol_converter(raw: bytes | None):
    if not raw:
        return lambda t: t  # default resolution is 1e-6: already microseconds
    v = raw[0]
    if v & 0x80:
        denom = 1 << (v & 0x7F)
    else:
        denom = 10 ** v
    return lambda t: t * 1_000_000 // denom


def read_pcap(source: str | Path | BinaryIO) -> tuple[list[FrameRecord], IngestStats]:
    """Read a pcap or pcapng capture into FrameRecords.

    Malformed packets are counted and skipped; a truncated file yields the
    frames up to the truncation point with stats.truncated set.  Raises
    UnsupportedLinkType for captures that are not 802.11.
    """
    stats = IngestStats()
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            return _dispatch_magic(fh, stats), stats
    return _dispatch_magic(source, stats), stats


def _dispatch_magic(fh: BinaryIO, stats: IngestStats) -> list[FrameRecord]:
    head = fh.read(4)
    fh = _Prepended(head, fh)
    if len(head) < 4:
        stats.truncated = True
        return []
    magic_le = struct.unpack("<I", head)[0]
    magic_be = struct.unpack(">I", head)[0]
    if magic_le == PCAPNG_MAGIC:
        return _read_pcapng(fh, stats)
    if magic_le in (PCAP_MAGIC_US, PCAP_MAGIC_NS) or magic_be in (PCAP_MAGIC_US, PCAP_MAGIC_NS):
        return _read_classic(fh, stats)
    raise UnsupportedLinkType(-1)


class _Prepended:
    """File wrapper that replays already-consumed magic bytes."""

    def __init__(self, head: bytes, fh: BinaryIO):
        self._buf = io.BytesIO(head)
        self._fh = fh

    def read(self, n: int) -> bytes:
        out = self._buf.read(n)
        if len(out) < n:
            out += self._fh.read(n - len(out))
        return out


def write_pcap(frames: list[FrameRecord], dest: str | Path | BinaryIO) -> None:
    """Write frames as little-endian classic pcap, link type 105, no FCS."""
    if isinstance(dest, (str, Path)):
        with open(dest, "wb") as fh:
            write_pcap(frames, fh)
        return
    dest.write(struct.pack("<IHHiIII", PCAP_MAGIC_US, 2, 4, 0, 0, 65535,
                           LINKTYPE_IEEE802_11))
    for frame in frames:
        data = dot11.encode_frame(frame)
        sec, usec = divmod(frame.ts_us, 1_000_000)
        dest.write(struct.pack("<IIII", sec, usec, len(data), len(data)))
        dest.write(data)


def pcap_bytes(frames: list[FrameRecord]) -> bytes:
    buf = io.BytesIO()
    write_pcap(frames, buf)
    return buf.getvalue()
