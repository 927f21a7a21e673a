"""Deauthentication race detection.

With management frame protection on, a forged deauthentication no longer
disconnects an established client, but it still works during the window
before keys are in place.  Two signatures cover that race:

  1. a deauthentication exchanged between a client and the AP, followed
     within deauth_follow_window by any association or EAPOL frame between
     the same pair - a real disconnect is not immediately followed by
     mid-handshake traffic;
  2. association request, successful association response, then a
     deauthentication sent by the client with reason code 7 (class 3 frame
     from a nonassociated station): the client-side trace of having been
     knocked out of the state machine mid-handshake.

Each signature match is one abnormal event; deauth_race_events of them
within deauth_race_span raise the alert.
"""

from __future__ import annotations

from collections import deque

from ..frames import (
    REASON_CLASS3_FROM_NONASSOC,
    STATUS_SUCCESS,
    SUBTYPE_ASSOC_REQ,
    SUBTYPE_ASSOC_RESP,
    AssocRespBody,
    DeauthBody,
    FrameRecord,
)
from .alerts import Alert, AlertKind
from .config import DetectorConfig


class DeauthRaceDetector:
    def __init__(self, cfg: DetectorConfig):
        self.cfg = cfg
        self._deauth_time: dict[str, int] = {}
        self._assoc_req: dict[str, int] = {}
        self._assoc_ok: dict[str, int] = {}
        self._events: deque[tuple[int, str, int]] = deque()  # ts, client, frame
        self.event_total = 0

    @property
    def events(self) -> list[tuple[int, str, int]]:
        return list(self._events)

    @property
    def deauth_time(self) -> dict[str, int]:
        return dict(self._deauth_time)

    def _client_of(self, frame: FrameRecord) -> str | None:
        ap = self.cfg.protected_bssid
        if frame.source_addr == ap and frame.receiver_addr not in (None, ap):
            return frame.receiver_addr
        if frame.receiver_addr == ap and frame.source_addr not in (None, ap):
            return frame.source_addr
        return None

    def on_deauth(self, frame: FrameRecord) -> Alert | None:
        client = self._client_of(frame)
        if client is None or not isinstance(frame.body, DeauthBody):
            return None
        self._deauth_time[client] = frame.ts_us
        if (frame.source_addr == client
                and frame.body.reason_code == REASON_CLASS3_FROM_NONASSOC):
            ok = self._assoc_ok.get(client)
            req = self._assoc_req.get(client)
            if (ok is not None and req is not None and req <= ok
                    and frame.ts_us - ok < self.cfg.deauth_follow_window):
                return self._event(frame.ts_us, client, frame.frame_number,
                                   "deauth with reason 7 right after association")
        return None

    def on_connection_frame(self, frame: FrameRecord) -> Alert | None:
        """Association or EAPOL frame between some client and the AP."""
        client = self._client_of(frame)
        if client is None:
            return None
        if frame.subtype == SUBTYPE_ASSOC_REQ and frame.source_addr == client:
            self._assoc_req[client] = frame.ts_us
        elif (frame.subtype == SUBTYPE_ASSOC_RESP
              and isinstance(frame.body, AssocRespBody)
              and frame.body.status_code == STATUS_SUCCESS
              and frame.receiver_addr == client):
            self._assoc_ok[client] = frame.ts_us
        deauth_ts = self._deauth_time.get(client)
        if deauth_ts is None:
            return None
        if frame.ts_us - deauth_ts < self.cfg.deauth_follow_window:
            return self._event(frame.ts_us, client, frame.frame_number,
                               "handshake traffic right after a deauth")
        return None

    def _event(self, ts_us: int, client: str, frame_number: int,
               what: str) -> Alert | None:
        self.event_total += 1
        self._events.append((ts_us, client, frame_number))
        while self._events and ts_us - self._events[0][0] > self.cfg.deauth_race_span:
            self._events.popleft()
        if len(self._events) < self.cfg.deauth_race_events:
            return None
        victims = tuple(dict.fromkeys(client for _, client, _ in self._events))
        evidence = tuple(fn for _, _, fn in self._events)
        self._events.clear()
        return Alert(
            kind=AlertKind.DEAUTH_RACE,
            detected_at_us=ts_us,
            victim_addrs=victims,
            evidence_frames=evidence,
            detail=what,
        )
