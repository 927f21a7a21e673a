"""Beacon flood, probe response flood, and rogue AP detection.

The detector first learns its radio neighborhood: for learning_period after
start (or after an AP-restart / management-system update signal) every
beacon and probe response registers its (BSSID, SSID) pair as authorized.
After that, a frame whose BSSID or SSID falls outside the authorized sets
is one abnormal event.  beaconflood_events of them inside beaconflood_span
raise BeaconFlood; the same machine running over probe responses raises
ProbeFlood.

A flood churns through identities; a rogue AP is the opposite, one
unauthorized identity that stays.  An identity persisting at least
rogue_min_persistence while identity churn stays below the flood threshold
is reported once as RogueAp.
"""

from __future__ import annotations

from collections import deque

from ..frames import SUBTYPE_BEACON, SUBTYPE_PROBE_RESP, BeaconBody, FrameRecord
from .alerts import Alert, AlertKind
from .config import DetectorConfig

Identity = tuple[str | None, str | None]


class _FloodWindow:
    """Sliding count of abnormal frames for one frame subtype."""

    def __init__(self, cfg: DetectorConfig, kind: AlertKind):
        self.cfg = cfg
        self.kind = kind
        self._events: deque[tuple[int, int]] = deque()  # ts, frame number
        self.event_times: list[int] = []

    def add(self, frame: FrameRecord) -> Alert | None:
        ts = frame.ts_us
        self.event_times.append(ts)
        self._events.append((ts, frame.frame_number))
        while self._events and ts - self._events[0][0] > self.cfg.beaconflood_span:
            self._events.popleft()
        if len(self._events) < self.cfg.beaconflood_events:
            return None
        evidence = tuple(fn for _, fn in self._events)
        self._events.clear()
        return Alert(
            kind=self.kind,
            detected_at_us=ts,
            victim_addrs=(self.cfg.protected_bssid,),
            evidence_frames=evidence,
            detail=f"{len(evidence)} frames from unauthorized identities "
                   f"inside {self.cfg.beaconflood_span // 1_000_000} s",
        )


class BeaconFloodDetector:
    def __init__(self, cfg: DetectorConfig):
        self.cfg = cfg
        self.authorized: set[Identity] = set()
        self._bssids: set[str | None] = set()
        self._ssids: set[str | None] = set()
        self._learn_until: int | None = None
        self._clock = 0
        self._beacons = _FloodWindow(cfg, AlertKind.BEACON_FLOOD)
        self._probes = _FloodWindow(cfg, AlertKind.PROBE_FLOOD)
        self._identity_seen: dict[Identity, tuple[int, int, int]] = {}  # first ts, last ts, first frame
        self._identity_last: dict[Identity, int] = {}  # abnormal churn tracking
        self._rogue_reported: set[Identity] = set()

    @property
    def learning(self) -> bool:
        return self._learn_until is None or self._clock < self._learn_until

    def _authorize(self, identity: Identity) -> None:
        self.authorized.add(identity)
        self._bssids.add(identity[0])
        self._ssids.add(identity[1])

    def on_frame(self, frame: FrameRecord) -> list[Alert]:
        if not isinstance(frame.body, BeaconBody):
            return []
        if frame.subtype not in (SUBTYPE_BEACON, SUBTYPE_PROBE_RESP):
            return []
        self._clock = frame.ts_us
        if self._learn_until is None:
            self._learn_until = frame.ts_us + self.cfg.learning_period
        identity: Identity = (frame.bssid, frame.body.ssid)
        if frame.ts_us < self._learn_until:
            self._authorize(identity)
            return []
        if identity[0] in self._bssids and identity[1] in self._ssids:
            return []
        alerts: list[Alert] = []
        if frame.subtype == SUBTYPE_BEACON:
            hit = self._beacons.add(frame)
            if hit is not None:
                alerts.append(hit)
            rogue = self._track_rogue(identity, frame)
            if rogue is not None:
                alerts.append(rogue)
        else:
            hit = self._probes.add(frame)
            if hit is not None:
                alerts.append(hit)
        return alerts

    def _track_rogue(self, identity: Identity, frame: FrameRecord) -> Alert | None:
        ts = frame.ts_us
        seen = self._identity_seen.get(identity)
        if seen is None:
            self._identity_seen[identity] = (ts, ts, frame.frame_number)
        else:
            self._identity_seen[identity] = (seen[0], ts, seen[2])
        self._identity_last[identity] = ts
        if len(self._identity_last) > 64:
            horizon = ts - self.cfg.beaconflood_span
            self._identity_last = {
                ident: last for ident, last in self._identity_last.items()
                if last > horizon
            }
        if identity in self._rogue_reported:
            return None
        first_ts, _, first_frame = self._identity_seen[identity]
        if ts - first_ts < self.cfg.rogue_min_persistence:
            return None
        horizon = ts - self.cfg.beaconflood_span
        churn = sum(1 for last in self._identity_last.values() if last > horizon)
        if churn >= self.cfg.beaconflood_events:
            return None  # flood conditions: no per-identity reporting
        self._rogue_reported.add(identity)
        return Alert(
            kind=AlertKind.ROGUE_AP,
            detected_at_us=ts,
            victim_addrs=(identity[0],) if identity[0] else (),
            evidence_frames=(first_frame, frame.frame_number),
            detail=f"unauthorized identity {identity[0]}/{identity[1]!r} "
                   f"persisting beyond "
                   f"{self.cfg.rogue_min_persistence // 1_000_000} s",
        )

    def on_restart(self, ts_us: int) -> None:
        self._learn_until = ts_us + self.cfg.learning_period

    def on_nms(self, entries, ts_us: int) -> None:
        for bssid, ssid in entries:
            self._authorize((bssid, ssid))
        self._learn_until = ts_us + self.cfg.learning_period

    @property
    def beacon_event_times(self) -> list[int]:
        return self._beacons.event_times

    @property
    def probe_event_times(self) -> list[int]:
        return self._probes.event_times
