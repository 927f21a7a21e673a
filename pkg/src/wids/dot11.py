"""802.11 frame codec: raw frame bytes to FrameRecord and back.

Decoding is total: malformed input degrades to a partially populated record
(or None when even the frame control field is missing) and bumps a counter
on the stats object, it never raises.  Encoding covers exactly the frame
shapes the synthesizer emits: management frames and EAPOL-Key data frames.

Layout references are the usual ones: 24-byte management header, little
endian fixed fields, tagged information elements, LLC/SNAP encapsulation
for EAPOL.
"""

from __future__ import annotations

import struct

from .errors import MalformedElement
from .frames import (
    AKM_SAE,
    AUTH_ALG_SAE,
    CIPHER_CCMP,
    SAE_COMMIT,
    SAE_CONFIRM,
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
    mac_bytes,
    mac_from_bytes,
)

# frame control byte 1 flags
FLAG_TO_DS = 0x01
FLAG_FROM_DS = 0x02
FLAG_RETRY = 0x08
FLAG_PROTECTED = 0x40

MGMT_HEADER_LEN = 24

# information element ids
IE_SSID = 0
IE_RSN = 48

RSN_VERSION = 1
SUITE_OUI = b"\x00\x0f\xac"

# capability info advertised by the synthesizer: ESS + privacy
CAP_ESS_PRIVACY = 0x0011

LLC_SNAP_EAPOL = b"\xaa\xaa\x03\x00\x00\x00\x88\x8e"
EAPOL_VERSION = 2
EAPOL_TYPE_KEY = 3
EAPOL_KEYDESC_RSN = 2

# key info bits used to tell the four handshake messages apart
KEYINFO_MIC = 0x0100
KEYINFO_ACK = 0x0080
KEYINFO_SECURE = 0x0200

# canonical key info values per message, descriptor version 2
EAPOL_KEY_INFO = {1: 0x008A, 2: 0x010A, 3: 0x13CA, 4: 0x030A}

# SAE scalar and element lengths per group (derived from modulus size)
_SAE_FIELD_LEN = {
    19: (32, 64), 20: (48, 96), 21: (66, 132),
    22: (128, 128), 23: (256, 256), 24: (256, 256),
    25: (24, 48), 26: (28, 56),
    27: (28, 56), 28: (32, 64), 29: (48, 96), 30: (64, 128),
}


def _filler(seed: int, length: int) -> bytes:
    # deterministic pseudo-random padding so encoding is a pure function
    return bytes(((seed * 197 + i * 73 + 39) ^ (i >> 3)) & 0xFF for i in range(length))


# ---------------------------------------------------------------------------
# information elements


def parse_rsn(data: bytes) -> RsnInfo:
    """Parse an RSN element body (without the id/len tag header)."""
    if len(data) < 8:
        raise MalformedElement(f"RSN element too short: {len(data)} bytes")
    version = struct.unpack_from("<H", data, 0)[0]
    if version != RSN_VERSION:
        raise MalformedElement(f"RSN version {version}")
    off = 2 + 4  # skip group cipher suite

    def suites(off: int) -> tuple[int, tuple[int, ...], int]:
        if off + 2 > len(data):
            raise MalformedElement("RSN element truncated at suite count")
        count = struct.unpack_from("<H", data, off)[0]
        off += 2
        out = []
        for _ in range(count):
            if off + 4 > len(data):
                raise MalformedElement("RSN element truncated in suite list")
            oui, typ = data[off:off + 3], data[off + 3]
            out.append(typ if oui == SUITE_OUI else (int.from_bytes(oui, "big") << 8) | typ)
            off += 4
        return count, tuple(out), off

    _, pairwise, off = suites(off)
    akm_count, akms, off = suites(off)
    mfp_cap = mfp_req = False
    if off + 2 <= len(data):
        caps = struct.unpack_from("<H", data, off)[0]
        mfp_req = bool(caps & 0x0040)
        mfp_cap = bool(caps & 0x0080)
    return RsnInfo(akm_count=akm_count, akm_types=akms, pairwise_ciphers=pairwise,
                   mfp_capable=mfp_cap, mfp_required=mfp_req)


def build_rsn(rsn: RsnInfo) -> bytes:
    def suite(sel: int) -> bytes:
        if sel < 0x100:
            return SUITE_OUI + bytes([sel])
        return sel.to_bytes(4, "big")

    caps = (0x0040 if rsn.mfp_required else 0) | (0x0080 if rsn.mfp_capable else 0)
    out = struct.pack("<H", RSN_VERSION)
    out += suite(CIPHER_CCMP)  # group cipher
    out += struct.pack("<H", len(rsn.pairwise_ciphers))
    out += b"".join(suite(s) for s in rsn.pairwise_ciphers)
    out += struct.pack("<H", rsn.akm_count)
    out += b"".join(suite(s) for s in rsn.akm_types)
    out += struct.pack("<H", caps)
    return out


def _iter_ies(data: bytes):
    off = 0
    while off + 2 <= len(data):
        ie_id, ie_len = data[off], data[off + 1]
        body = data[off + 2:off + 2 + ie_len]
        if len(body) < ie_len:
            raise MalformedElement("information element overruns the frame")
        yield ie_id, body
        off += 2 + ie_len


def _parse_ssid_rsn(data: bytes) -> tuple[str | None, RsnInfo | None]:
    ssid = rsn = None
    for ie_id, body in _iter_ies(data):
        if ie_id == IE_SSID and ssid is None:
            ssid = body.decode("utf-8", errors="replace")
        elif ie_id == IE_RSN and rsn is None:
            rsn = parse_rsn(body)
    return ssid, rsn


def _ie(ie_id: int, body: bytes) -> bytes:
    return bytes([ie_id, len(body)]) + body


def _ssid_rsn_ies(ssid: str | None, rsn: RsnInfo | None) -> bytes:
    out = b""
    if ssid is not None:
        out += _ie(IE_SSID, ssid.encode("utf-8"))
    if rsn is not None:
        out += _ie(IE_RSN, build_rsn(rsn))
    return out


# ---------------------------------------------------------------------------
# body parsing


def _parse_mgmt_body(subtype: int, body: bytes):
    if subtype in (SUBTYPE_BEACON, SUBTYPE_PROBE_RESP):
        tsf, interval, _cap = struct.unpack_from("<QHH", body, 0)
        ssid, rsn = _parse_ssid_rsn(body[12:])
        return BeaconBody(tsf_timestamp=tsf, beacon_interval=interval, ssid=ssid, rsn=rsn)
    if subtype == SUBTYPE_AUTH:
        alg, seq, status = struct.unpack_from("<HHH", body, 0)
        group = None
        if alg == AUTH_ALG_SAE and seq == SAE_COMMIT and len(body) >= 8:
            group = struct.unpack_from("<H", body, 6)[0]
        return AuthBody(auth_alg=alg, auth_seq=seq, status_code=status, sae_group=group)
    if subtype == SUBTYPE_ASSOC_REQ:
        ssid, rsn = _parse_ssid_rsn(body[4:])
        return AssocReqBody(ssid=ssid, rsn=rsn)
    if subtype == SUBTYPE_ASSOC_RESP:
        _cap, status, aid = struct.unpack_from("<HHH", body, 0)
        return AssocRespBody(status_code=status, aid=aid & 0x3FFF)
    if subtype in (SUBTYPE_DEAUTH, SUBTYPE_DISASSOC):
        reason = struct.unpack_from("<H", body, 0)[0]
        return DeauthBody(reason_code=reason)
    return None


def _parse_eapol(payload: bytes):
    """Return an EapolKeyBody if payload is LLC/SNAP wrapped EAPOL-Key."""
    if not payload.startswith(LLC_SNAP_EAPOL):
        return None
    eapol = payload[len(LLC_SNAP_EAPOL):]
    if len(eapol) < 4 or eapol[1] != EAPOL_TYPE_KEY:
        return None
    if len(eapol) < 7:
        return None
    desc_type = eapol[4]
    key_info = struct.unpack_from(">H", eapol, 5)[0]
    mic = bool(key_info & KEYINFO_MIC)
    ack = bool(key_info & KEYINFO_ACK)
    secure = bool(key_info & KEYINFO_SECURE)
    if not mic and ack:
        msg = 1
    elif mic and ack:
        msg = 3
    elif mic and secure:
        msg = 4
    elif mic:
        msg = 2
    else:
        msg = 0
    return EapolKeyBody(descriptor_type=desc_type, message_nr=msg)


# ---------------------------------------------------------------------------
# frame decode


def decode_frame(data: bytes, frame_number: int, ts_us: int,
                 last_seq: dict[str, int] | None = None,
                 stats=None, rssi_dbm: int | None = None) -> FrameRecord | None:
    """Decode one 802.11 frame. Returns None if even the header is absent.

    last_seq maps transmitter to the sequence number of its previously
    accepted (non-retry) frame; a frame is flagged is_retry only when the
    retry bit is set and its sequence number repeats that value.
    """
    if len(data) < 2:
        return None
    fc0, fc1 = data[0], data[1]
    ftype = (fc0 >> 2) & 0x3
    subtype = (fc0 >> 4) & 0xF
    retry_flag = bool(fc1 & FLAG_RETRY)
    to_ds = bool(fc1 & FLAG_TO_DS)
    from_ds = bool(fc1 & FLAG_FROM_DS)

    def addr(off: int) -> str | None:
        return mac_from_bytes(data[off:off + 6]) if len(data) >= off + 6 else None

    a1, a2, a3 = addr(4), addr(10), addr(16)
    source = receiver = bssid = None
    seq_num = None
    body = None
    body_off = None

    if ftype == TYPE_MANAGEMENT:
        receiver, source, bssid = a1, a2, a3
        body_off = MGMT_HEADER_LEN
    elif ftype == TYPE_DATA:
        if to_ds and from_ds:
            receiver = a1
        elif to_ds:
            receiver, source, bssid = a1, a2, a1
        elif from_ds:
            receiver, source, bssid = a1, a3, a2
        else:
            receiver, source, bssid = a1, a2, a3
        body_off = 30 if (to_ds and from_ds) else MGMT_HEADER_LEN
        if subtype & 0x8:  # QoS data: 2 more header bytes
            body_off += 2
    else:
        receiver = a1
        source = a2  # present for RTS-like control frames, None otherwise

    if ftype != 1 and len(data) >= 24:  # control frames carry no sequence
        seq_num = struct.unpack_from("<H", data, 22)[0] >> 4

    if body_off is not None and len(data) > body_off:
        try:
            if ftype == TYPE_MANAGEMENT:
                body = _parse_mgmt_body(subtype, data[body_off:])
            elif ftype == TYPE_DATA and not (fc1 & FLAG_PROTECTED):
                body = _parse_eapol(data[body_off:])
        except (struct.error, MalformedElement, IndexError):
            body = None
            if stats is not None:
                stats.malformed_bodies += 1

    is_retry = False
    if source is not None and seq_num is not None:
        if retry_flag and last_seq is not None and last_seq.get(source) == seq_num:
            is_retry = True
        elif last_seq is not None:
            last_seq[source] = seq_num

    return FrameRecord(
        frame_number=frame_number, ts_us=ts_us, frame_type=ftype, subtype=subtype,
        source_addr=source, receiver_addr=receiver, bssid=bssid, seq_num=seq_num,
        is_retry=is_retry, body=body, rssi_dbm=rssi_dbm,
    )


# ---------------------------------------------------------------------------
# frame encode


def _encode_mgmt_body(frame: FrameRecord) -> bytes:
    body = frame.body
    n = frame.frame_number
    if isinstance(body, BeaconBody):
        fixed = struct.pack("<QHH", body.tsf_timestamp, body.beacon_interval, CAP_ESS_PRIVACY)
        return fixed + _ssid_rsn_ies(body.ssid, body.rsn)
    if isinstance(body, AuthBody):
        out = struct.pack("<HHH", body.auth_alg, body.auth_seq, body.status_code)
        if body.auth_alg == AUTH_ALG_SAE and body.auth_seq == SAE_COMMIT:
            group = body.sae_group if body.sae_group is not None else 19
            out += struct.pack("<H", group)
            if body.status_code == 0:
                scalar_len, element_len = _SAE_FIELD_LEN.get(group, (32, 64))
                out += _filler(n, scalar_len) + _filler(n + 1, element_len)
        elif body.auth_alg == AUTH_ALG_SAE and body.auth_seq == SAE_CONFIRM:
            out += struct.pack("<H", 1) + _filler(n, 32)
        return out
    if isinstance(body, AssocReqBody):
        return struct.pack("<HH", CAP_ESS_PRIVACY, 10) + _ssid_rsn_ies(body.ssid, body.rsn)
    if isinstance(body, AssocRespBody):
        return struct.pack("<HHH", CAP_ESS_PRIVACY, body.status_code, body.aid | 0xC000)
    if isinstance(body, DeauthBody):
        return struct.pack("<H", body.reason_code)
    if body is None:
        return b""
    raise ValueError(f"cannot encode body {type(body).__name__} "
                     f"for management subtype {frame.subtype}")


def _encode_eapol(frame: FrameRecord) -> bytes:
    body = frame.body
    assert isinstance(body, EapolKeyBody)
    key_info = EAPOL_KEY_INFO.get(body.message_nr)
    if key_info is None:
        raise ValueError(f"cannot encode EAPOL-Key message {body.message_nr}")
    nonce = _filler(frame.frame_number, 32) if body.message_nr in (1, 2) else bytes(32)
    mic = bytes(16) if body.message_nr == 1 else _filler(frame.frame_number + 2, 16)
    key = struct.pack(">BHH", body.descriptor_type, key_info, 16)
    key += body.message_nr.to_bytes(8, "big")        # replay counter
    key += nonce + bytes(16) + bytes(8) + bytes(8)   # nonce, iv, rsc, id
    key += mic + struct.pack(">H", 0)
    eapol = struct.pack(">BBH", EAPOL_VERSION, EAPOL_TYPE_KEY, len(key)) + key
    return LLC_SNAP_EAPOL + eapol


def encode_frame(frame: FrameRecord) -> bytes:
    """Encode a FrameRecord to raw 802.11 bytes (no FCS).

    Deterministic: the same record always yields the same bytes.  Only the
    shapes produced by the synthesizer are supported.
    """
    fc0 = (frame.frame_type << 2) | (frame.subtype << 4)
    fc1 = FLAG_RETRY if frame.is_retry else 0
    seq_ctrl = ((frame.seq_num or 0) & 0xFFF) << 4

    if frame.frame_type == TYPE_MANAGEMENT:
        a1, a2, a3 = frame.receiver_addr, frame.source_addr, frame.bssid
        header = struct.pack("<BBH", fc0, fc1, 0)
        header += mac_bytes(a1) + mac_bytes(a2) + mac_bytes(a3)
        header += struct.pack("<H", seq_ctrl)
        return header + _encode_mgmt_body(frame)

    if frame.frame_type == TYPE_DATA and isinstance(frame.body, EapolKeyBody):
        if frame.source_addr == frame.bssid:     # AP to client
            fc1 |= FLAG_FROM_DS
            a1, a2, a3 = frame.receiver_addr, frame.bssid, frame.source_addr
        else:                                    # client to AP
            fc1 |= FLAG_TO_DS
            a1, a2, a3 = frame.bssid, frame.source_addr, frame.bssid
        header = struct.pack("<BBH", fc0, fc1, 0)
        header += mac_bytes(a1) + mac_bytes(a2) + mac_bytes(a3)
        header += struct.pack("<H", seq_ctrl)
        return header + _encode_eapol(frame)

    raise ValueError(f"cannot encode frame type {frame.frame_type} "
                     f"subtype {frame.subtype}")
