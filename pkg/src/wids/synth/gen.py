"""Deterministic trace generation.

gen() turns a Scenario into a list of FrameRecords with realistic header
bookkeeping: per-transmitter sequence counters (spoofed transmitters get
independent counters seeded away from the legitimate ones so their numbers
never collide), link-layer retries that reuse the original sequence number,
and timestamps placed by cumulative rounding so long runs keep the exact
requested rate with no drift.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass, field

from ..frames import (
    AKM_PSK,
    AKM_SAE,
    AUTH_ALG_SAE,
    REASON_CLASS3_FROM_NONASSOC,
    SAE_COMMIT,
    SAE_CONFIRM,
    STATUS_SUCCESS,
    STATUS_UNSUPPORTED_GROUP,
    SUBTYPE_ASSOC_REQ,
    SUBTYPE_ASSOC_RESP,
    SUBTYPE_AUTH,
    SUBTYPE_BEACON,
    SUBTYPE_DEAUTH,
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
from .scenarios import Scenario, ScenarioKind

RSN_SAE = RsnInfo(akm_count=1, akm_types=(AKM_SAE,),
                  mfp_capable=True, mfp_required=True)
RSN_PSK = RsnInfo(akm_count=1, akm_types=(AKM_PSK,))
RSN_TRANSITION = RsnInfo(akm_count=2, akm_types=(AKM_PSK, AKM_SAE),
                         mfp_capable=True)

TU_US = 1024

# spoofed transmitters count from here so their sequence numbers stay clear
# of the genuine ones for any trace shorter than 2048 frames per station
SPOOF_SEQ_START = 2048

_ATTACKER = "02:00:00:00:66:01"


@dataclass
class _Intent:
    ts_us: int
    frame_type: int
    subtype: int
    source: str
    receiver: str
    bssid: str
    body: object
    tx: str
    retry_of: int | None = None


@dataclass
class TraceBuilder:
    """Collects frame intents, then assigns order, sequence numbers and
    frame numbers in one pass."""

    intents: list[_Intent] = field(default_factory=list)
    starts: dict[str, int] = field(default_factory=dict)

    def add(self, ts_us, frame_type, subtype, source, receiver, bssid,
            body=None, tx=None) -> int:
        self.intents.append(_Intent(
            ts_us=int(ts_us), frame_type=frame_type, subtype=subtype,
            source=source, receiver=receiver, bssid=bssid, body=body,
            tx=tx if tx is not None else source))
        return len(self.intents) - 1

    def add_retry(self, of: int, ts_us: int) -> int:
        orig = self.intents[of]
        if ts_us <= orig.ts_us:
            raise ValueError("retry must come after the original")
        self.intents.append(_Intent(
            ts_us=int(ts_us), frame_type=orig.frame_type,
            subtype=orig.subtype, source=orig.source,
            receiver=orig.receiver, bssid=orig.bssid, body=orig.body,
            tx=orig.tx, retry_of=of))
        return len(self.intents) - 1

    def spoofed(self, tx: str):
        """Mark tx as a spoofed transmitter with its own counter."""
        self.starts.setdefault(tx, SPOOF_SEQ_START)

    def build(self) -> list[FrameRecord]:
        order = sorted(range(len(self.intents)),
                       key=lambda i: (self.intents[i].ts_us, i))
        counters: dict[str, int] = dict(self.starts)
        seq_of: dict[int, int] = {}
        records = []
        for num, idx in enumerate(order, 1):
            it = self.intents[idx]
            if it.retry_of is not None:
                seq = seq_of[it.retry_of]
            else:
                seq = counters.get(it.tx, 0) % 4096
                counters[it.tx] = seq + 1
                seq_of[idx] = seq
            records.append(FrameRecord(
                frame_number=num, ts_us=it.ts_us, frame_type=it.frame_type,
                subtype=it.subtype, source_addr=it.source,
                receiver_addr=it.receiver, bssid=it.bssid, seq_num=seq,
                is_retry=it.retry_of is not None, body=it.body))
        return records


def _spread(t0_us: int, count: int, rate_fps: float) -> list[int]:
    # cumulative rounding: no drift however long the run is
    return [t0_us + round(i * 1_000_000 / rate_fps) for i in range(count)]


def _client_mac(i: int) -> str:
    return f"02:00:00:00:02:{i + 1:02x}"


def _random_mac(rng: random.Random, used: set[str]) -> str:
    while True:
        addr = "0a:" + ":".join(f"{rng.randrange(256):02x}" for _ in range(5))
        if addr not in used:
            used.add(addr)
            return addr


def _beacon(b: TraceBuilder, ts, bssid, ssid, rsn, t0, interval_tu, tx=None,
            subtype=SUBTYPE_BEACON, receiver="ff:ff:ff:ff:ff:ff"):
    body = BeaconBody(tsf_timestamp=max(0, ts - t0), beacon_interval=interval_tu,
                      ssid=ssid, rsn=rsn)
    return b.add(ts, TYPE_MANAGEMENT, subtype, bssid, receiver, bssid,
                 body, tx=tx)


def _auth(b: TraceBuilder, ts, src, dst, bssid, seq, status=STATUS_SUCCESS,
          group=None, tx=None):
    body = AuthBody(auth_alg=AUTH_ALG_SAE, auth_seq=seq, status_code=status,
                    sae_group=group)
    return b.add(ts, TYPE_MANAGEMENT, SUBTYPE_AUTH, src, dst, bssid, body,
                 tx=tx)


def _connect(b: TraceBuilder, t, client, ap, ssid, group=19, step_us=2000):
    """Complete join: SAE handshake, association, 4-way handshake.

    Exactly ten frames; returns the timestamp after the last one.
    """
    _auth(b, t, client, ap, ap, SAE_COMMIT, group=group)
    _auth(b, t + step_us, ap, client, ap, SAE_COMMIT, group=group)
    _auth(b, t + 2 * step_us, client, ap, ap, SAE_CONFIRM)
    _auth(b, t + 3 * step_us, ap, client, ap, SAE_CONFIRM)
    b.add(t + 4 * step_us, TYPE_MANAGEMENT, SUBTYPE_ASSOC_REQ, client, ap, ap,
          AssocReqBody(ssid=ssid, rsn=RSN_SAE))
    b.add(t + 5 * step_us, TYPE_MANAGEMENT, SUBTYPE_ASSOC_RESP, ap, client, ap,
          AssocRespBody(status_code=STATUS_SUCCESS, aid=1))
    for nr in (1, 2, 3, 4):
        src, dst = (ap, client) if nr % 2 else (client, ap)
        b.add(t + (5 + nr) * step_us, TYPE_DATA, 0, src, dst, ap,
              EapolKeyBody(message_nr=nr))
    return t + 9 * step_us


def gen(scenario: Scenario) -> list[FrameRecord]:
    """Generate the trace for a scenario. Pure: same input, same output."""
    rng = random.Random(scenario.seed)
    b = TraceBuilder()
    _GENERATORS[scenario.kind](scenario, b, rng)
    return b.build()


def _gen_benign_connect(sc: Scenario, b: TraceBuilder, rng):
    for i in range(sc.n_clients):
        _connect(b, sc.t0_us + i * 1_000_000, _client_mac(i), sc.bssid,
                 sc.ssid)


def _gen_restart_storm(sc: Scenario, b: TraceBuilder, rng):
    window = round(sc.storm_window_s * 1e6)
    offsets = sorted(rng.randrange(window) for _ in range(sc.n_clients))
    for i, off in enumerate(offsets):
        _connect(b, sc.t0_us + off, _client_mac(i), sc.bssid, sc.ssid)


def _gen_transition_beacons(sc: Scenario, b: TraceBuilder, rng):
    period = sc.beacon_interval_tu * TU_US
    for ts in range(sc.t0_us, sc.t0_us + round(sc.duration_s * 1e6), period):
        _beacon(b, ts, sc.bssid, sc.ssid, RSN_TRANSITION, sc.t0_us,
                sc.beacon_interval_tu)


def _gen_reconfig_gap(sc: Scenario, b: TraceBuilder, rng):
    # operator flips the network from SAE to PSK with the radio down in
    # between; the silence is longer than any legitimate outage window
    period = sc.beacon_interval_tu * TU_US
    half = round(sc.duration_s * 1e6 / 2)
    for ts in range(sc.t0_us, sc.t0_us + half, period):
        _beacon(b, ts, sc.bssid, sc.ssid, RSN_SAE, sc.t0_us,
                sc.beacon_interval_tu)
    resume = sc.t0_us + half + round(sc.gap_s * 1e6)
    for ts in range(resume, resume + half, period):
        _beacon(b, ts, sc.bssid, sc.ssid, RSN_PSK, sc.t0_us,
                sc.beacon_interval_tu)


def _gen_group_rejection(sc: Scenario, b: TraceBuilder, rng):
    # a picky client asks for an unsupported group, gets turned down, and
    # retries a second too late for anyone to call it a race
    client = _client_mac(0)
    t = sc.t0_us
    _auth(b, t, client, sc.bssid, sc.bssid, SAE_COMMIT, group=27)
    _auth(b, t + 2000, sc.bssid, client, sc.bssid, SAE_COMMIT,
          status=STATUS_UNSUPPORTED_GROUP, group=27)
    _connect(b, t + 1_000_000, client, sc.bssid, sc.ssid)


def _gen_auth_flood(sc: Scenario, b: TraceBuilder, rng):
    count = round(sc.rate_fps * sc.duration_s)
    used: set[str] = set()
    for ts in _spread(sc.t0_us, count, sc.rate_fps):
        src = _random_mac(rng, used)
        b.spoofed(src)
        _auth(b, ts, src, sc.bssid, sc.bssid, SAE_COMMIT, group=19)


def _spoofed_beacons(sc: Scenario, b: TraceBuilder, rsn, legit_rsn):
    period = sc.beacon_interval_tu * TU_US
    end = sc.t0_us + round(sc.duration_s * 1e6)
    for ts in range(sc.t0_us, end, period):
        _beacon(b, ts, sc.bssid, sc.ssid, legit_rsn, sc.t0_us,
                sc.beacon_interval_tu)
    atk = "atk:" + sc.bssid
    b.spoofed(atk)
    start = sc.t0_us + round(sc.attack_delay_s * 1e6)
    for ts in range(start, end, sc.attacker_interval_tu * TU_US):
        _beacon(b, ts, sc.bssid, sc.ssid, rsn, sc.t0_us,
                sc.attacker_interval_tu, tx=atk)


def _gen_try_wpa2(sc: Scenario, b: TraceBuilder, rng):
    _spoofed_beacons(sc, b, RSN_PSK, RSN_SAE)


def _gen_downgrade_transition(sc: Scenario, b: TraceBuilder, rng):
    _spoofed_beacons(sc, b, RSN_PSK, RSN_TRANSITION)


def _race_rounds(sc: Scenario, b: TraceBuilder, status: int):
    client = _client_mac(0)
    atk = "atk:" + sc.bssid
    b.spoofed(atk)
    for r in range(sc.repetitions):
        t = sc.t0_us + r * 2_000_000
        _auth(b, t, client, sc.bssid, sc.bssid, SAE_COMMIT, group=19)
        # the spoofed rejection beats the genuine reply onto the air
        _auth(b, t + 1000, sc.bssid, client, sc.bssid, SAE_COMMIT,
              status=status, group=19, tx=atk)
        ok = _auth(b, t + 3000, sc.bssid, client, sc.bssid, SAE_COMMIT,
                   group=19)
        b.add_retry(ok, t + 13_000)
        b.add_retry(ok, t + 23_000)


def _gen_commit_out_of_range(sc: Scenario, b: TraceBuilder, rng):
    _race_rounds(sc, b, status=0x0001)


def _gen_group_unsupported(sc: Scenario, b: TraceBuilder, rng):
    _race_rounds(sc, b, status=STATUS_UNSUPPORTED_GROUP)


def _gen_group_downgrade(sc: Scenario, b: TraceBuilder, rng):
    groups = sc.groups or (21, 20, 19)
    client = _client_mac(0)
    atk = "atk:" + sc.bssid
    b.spoofed(atk)
    t = sc.t0_us
    for g in groups[:-1]:
        _auth(b, t, client, sc.bssid, sc.bssid, SAE_COMMIT, group=g)
        _auth(b, t + 1000, sc.bssid, client, sc.bssid, SAE_COMMIT,
              status=STATUS_UNSUPPORTED_GROUP, group=g, tx=atk)
        _auth(b, t + 3000, sc.bssid, client, sc.bssid, SAE_COMMIT, group=g)
        t += 2_000_000
    _connect(b, t, client, sc.bssid, sc.ssid, group=groups[-1])


def _gen_timing_probes(sc: Scenario, b: TraceBuilder, rng):
    # patient attacker walks the weak groups, counting on the rejections
    # themselves: each one leaks a little derivation timing
    probes = [_ATTACKER[:-2] + f"{i + 1:02x}" for i in range(5)]
    for src in probes:
        b.spoofed(src)
    weak = sc.groups or (22, 23, 24)
    step = round(sc.duration_s * 1e6 / sc.probe_count)
    for i in range(sc.probe_count):
        t = sc.t0_us + i * step
        src = probes[i % len(probes)]
        g = weak[i % len(weak)]
        _auth(b, t, src, sc.bssid, sc.bssid, SAE_COMMIT, group=g)
        _auth(b, t + 2000, sc.bssid, src, sc.bssid, SAE_COMMIT,
              status=STATUS_UNSUPPORTED_GROUP, group=g)


def _gen_deauth_race(sc: Scenario, b: TraceBuilder, rng):
    client = _client_mac(0)
    ap = sc.bssid
    atk = "atk:" + ap
    b.spoofed(atk)
    for r in range(sc.repetitions):
        t = sc.t0_us + r * 2_000_000
        _auth(b, t, client, ap, ap, SAE_COMMIT, group=19)
        _auth(b, t + 2000, ap, client, ap, SAE_COMMIT, group=19)
        _auth(b, t + 4000, client, ap, ap, SAE_CONFIRM)
        _auth(b, t + 6000, ap, client, ap, SAE_CONFIRM)
        b.add(t + 8000, TYPE_MANAGEMENT, SUBTYPE_ASSOC_REQ, client, ap, ap,
              AssocReqBody(ssid=sc.ssid, rsn=RSN_SAE))
        # forged deauth slips in between request and response
        b.add(t + 9000, TYPE_MANAGEMENT, SUBTYPE_DEAUTH, ap, client, ap,
              DeauthBody(reason_code=REASON_CLASS3_FROM_NONASSOC), tx=atk)
        b.add(t + 10_000, TYPE_MANAGEMENT, SUBTYPE_ASSOC_RESP, ap, client, ap,
              AssocRespBody(status_code=STATUS_SUCCESS, aid=1))
        b.add(t + 12_000, TYPE_DATA, 0, ap, client, ap,
              EapolKeyBody(message_nr=1))
        # the confused client now tears the session down itself
        b.add(t + 14_000, TYPE_MANAGEMENT, SUBTYPE_DEAUTH, client, ap, ap,
              DeauthBody(reason_code=REASON_CLASS3_FROM_NONASSOC))


def _flood_identities(sc: Scenario, rng) -> list[tuple[str, str]]:
    used: set[str] = set()
    alphabet = string.ascii_lowercase + string.digits
    out = []
    seen_ssids = {sc.ssid}
    for _ in range(sc.n_identities):
        bssid = _random_mac(rng, used)
        if sc.mode == "confusing":
            while True:
                pos = rng.randrange(len(sc.ssid))
                repl = rng.choice(alphabet)
                ssid = sc.ssid[:pos] + repl + sc.ssid[pos + 1:]
                if ssid not in seen_ssids:
                    break
        else:
            while True:
                ssid = "".join(rng.choice(alphabet) for _ in range(8))
                if ssid not in seen_ssids:
                    break
        seen_ssids.add(ssid)
        out.append((bssid, ssid))
    return out


def _authorized_lead(sc: Scenario, b: TraceBuilder) -> tuple[int, str]:
    """Learning-phase traffic from the two real APs; returns (attack start,
    second bssid)."""
    second = sc.bssid[:-2] + "02"
    period = sc.beacon_interval_tu * TU_US
    end = sc.t0_us + round(sc.learning_lead_s * 1e6)
    for ts in range(sc.t0_us, end, period):
        _beacon(b, ts, sc.bssid, sc.ssid, RSN_SAE, sc.t0_us,
                sc.beacon_interval_tu)
        _beacon(b, ts + period // 2, second, sc.ssid + "-guest", RSN_SAE,
                sc.t0_us, sc.beacon_interval_tu)
    return end, second


def _gen_beacon_storm(sc: Scenario, b: TraceBuilder, rng,
                      subtype=SUBTYPE_BEACON):
    start, _ = _authorized_lead(sc, b)
    identities = _flood_identities(sc, rng)
    count = round(sc.rate_fps * sc.burst_s)
    receiver = "ff:ff:ff:ff:ff:ff"
    if subtype == SUBTYPE_PROBE_RESP:
        receiver = _client_mac(0)
    for i, ts in enumerate(_spread(start, count, sc.rate_fps)):
        bssid, ssid = identities[i % len(identities)]
        b.spoofed(bssid)
        _beacon(b, ts, bssid, ssid, RSN_PSK, sc.t0_us,
                sc.beacon_interval_tu, subtype=subtype, receiver=receiver)


def _gen_beacon_flood(sc: Scenario, b: TraceBuilder, rng):
    _gen_beacon_storm(sc, b, rng, subtype=SUBTYPE_BEACON)


def _gen_probe_flood(sc: Scenario, b: TraceBuilder, rng):
    _gen_beacon_storm(sc, b, rng, subtype=SUBTYPE_PROBE_RESP)


def _gen_rogue_ap(sc: Scenario, b: TraceBuilder, rng):
    start, _ = _authorized_lead(sc, b)
    rogue = "02:00:00:00:77:01"
    b.spoofed(rogue)
    period = sc.beacon_interval_tu * TU_US
    for ts in range(start, start + round(sc.duration_s * 1e6), period):
        _beacon(b, ts, rogue, "free-wifi", RSN_PSK, sc.t0_us,
                sc.beacon_interval_tu)


_GENERATORS = {
    ScenarioKind.BENIGN_CONNECT: _gen_benign_connect,
    ScenarioKind.AP_RESTART_STORM: _gen_restart_storm,
    ScenarioKind.TRANSITION_BEACONS: _gen_transition_beacons,
    ScenarioKind.RECONFIG_GAP: _gen_reconfig_gap,
    ScenarioKind.GROUP_REJECTION: _gen_group_rejection,
    ScenarioKind.AUTH_FLOOD: _gen_auth_flood,
    ScenarioKind.TRY_WPA2: _gen_try_wpa2,
    ScenarioKind.DOWNGRADE_TRANSITION: _gen_downgrade_transition,
    ScenarioKind.COMMIT_OUT_OF_RANGE: _gen_commit_out_of_range,
    ScenarioKind.GROUP_UNSUPPORTED: _gen_group_unsupported,
    ScenarioKind.GROUP_DOWNGRADE: _gen_group_downgrade,
    ScenarioKind.TIMING_PROBES: _gen_timing_probes,
    ScenarioKind.DEAUTH_RACE: _gen_deauth_race,
    ScenarioKind.BEACON_FLOOD: _gen_beacon_flood,
    ScenarioKind.PROBE_FLOOD: _gen_probe_flood,
    ScenarioKind.ROGUE_AP: _gen_rogue_ap,
}
