"""WPA3 to WPA2 downgrade detection.

Keeps the last two beacons that carry the protected SSID and BSSID.  An
attacker forcing clients toward WPA2 has to interleave its own beacons with
the real AP's, so adjacent beacons flap between AKM sets: the advertised
AKM count changes, or SAE support disappears outright.  Each such flap is
one abnormal event; downgrade_events of them inside downgrade_span raise
the alert.

Two benign cases are excused: a gap above downgrade_ignore_gap between the
pair (capture interruptions, channel switches), and events in a window of
the same width around an AP-restart control signal (operators do
reconfigure networks).
"""

from __future__ import annotations

from collections import deque

from ..frames import SUBTYPE_BEACON, BeaconBody, FrameRecord
from .alerts import Alert, AlertKind
from .config import DetectorConfig


class DowngradeDetector:
    def __init__(self, cfg: DetectorConfig):
        self.cfg = cfg
        self._prev: tuple[int, int, bool, int] | None = None  # ts, akm count, sae, frame
        self._events: deque[tuple[int, int]] = deque()        # ts, frame number
        self._suppress_until = -1
        self.event_total = 0

    def on_frame(self, frame: FrameRecord) -> Alert | None:
        if frame.subtype != SUBTYPE_BEACON or not isinstance(frame.body, BeaconBody):
            return None
        if (frame.bssid != self.cfg.protected_bssid
                or frame.body.ssid != self.cfg.protected_ssid):
            return None
        rsn = frame.body.rsn
        cur = (
            frame.ts_us,
            rsn.akm_count if rsn is not None else 0,
            rsn.has_sae if rsn is not None else False,
            frame.frame_number,
        )
        prev, self._prev = self._prev, cur
        if prev is None:
            return None
        ts = cur[0]
        if ts - prev[0] > self.cfg.downgrade_ignore_gap:
            return None  # stale comparison, not evidence of anything
        mismatch = cur[1] != prev[1] or (prev[2] and not cur[2])
        if not mismatch or ts <= self._suppress_until:
            return None
        self.event_total += 1
        self._events.append((ts, cur[3]))
        while self._events and ts - self._events[0][0] > self.cfg.downgrade_span:
            self._events.popleft()
        if len(self._events) < self.cfg.downgrade_events:
            return None
        evidence = tuple(fn for _, fn in self._events)
        self._events.clear()
        return Alert(
            kind=AlertKind.WPA2_DOWNGRADE,
            detected_at_us=ts,
            victim_addrs=(self.cfg.protected_bssid,),
            evidence_frames=evidence,
            detail="advertised AKM set flapping between beacons "
                   f"({self.cfg.downgrade_events} changes inside "
                   f"{self.cfg.downgrade_span // 1_000_000} s)",
        )

    def on_restart(self, ts_us: int) -> None:
        """AP restart signal: drop events around it, restart the pairing."""
        gap = self.cfg.downgrade_ignore_gap
        self._suppress_until = ts_us + gap
        while self._events and self._events[-1][0] >= ts_us - gap:
            self._events.pop()
        self._prev = None
