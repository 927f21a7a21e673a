"""SAE authentication flood detection.

The raw signal is a buffer of the last 8 connection requests (SAE commits
toward the protected AP): when the buffer spans less than 500 ms, that is
one abnormal event, equivalent to a sustained rate above 16 frames/s.

Two guards keep benign bursts quiet.  First, every abnormal event holds the
8 requester addresses and waits flood_success_wait; if a majority of those
addresses completed their handshake (the AP sent them a success confirm),
the event is cancelled - reconnection storms after an AP restart look
exactly like the start of a flood.  Second, confirmed events must repeat:
at least flood_events_per_min in each one-minute window for flood_sustain,
with the windows anchored at the first confirmed event, before the alert
fires.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ..frames import (
    AUTH_ALG_SAE,
    SAE_CONFIRM,
    STATUS_SUCCESS,
    AuthBody,
    FrameRecord,
    is_connection_request,
)
from .alerts import Alert, AlertKind
from .config import MINUTE, DetectorConfig


class RequestLedger:
    """Shared classification of connection requests and their outcomes.

    A commit toward the AP counts as an unsuccessful request the moment it
    is seen; it is cancelled if the AP answers that client with a success
    confirm within flood_success_wait.  Both the flood and the timing
    detectors consume this classification so they can never disagree.
    """

    def __init__(self, cfg: DetectorConfig):
        self.cfg = cfg
        self.success_time: dict[str, int] = {}
        self._awaiting: dict[str, deque[int]] = {}

    def observe(self, frame: FrameRecord) -> tuple[bool, int]:
        """Process one authentication frame; returns (counted, cancelled)."""
        body = frame.body
        if not isinstance(body, AuthBody):
            return False, 0
        ap = self.cfg.protected_bssid
        if (frame.source_addr == ap and frame.receiver_addr
                and body.auth_alg == AUTH_ALG_SAE
                and body.auth_seq == SAE_CONFIRM
                and body.status_code == STATUS_SUCCESS):
            client = frame.receiver_addr
            self.success_time[client] = frame.ts_us
            queue = self._awaiting.get(client)
            if not queue:
                return False, 0
            cutoff = frame.ts_us - self.cfg.flood_success_wait
            while queue and queue[0] < cutoff:
                queue.popleft()  # too old for this confirm to answer
            cancelled = len(queue)
            queue.clear()
            return False, cancelled
        if is_connection_request(frame, ap) and not frame.is_retry:
            queue = self._awaiting.setdefault(frame.source_addr, deque())
            cutoff = frame.ts_us - self.cfg.flood_success_wait
            while queue and queue[0] < cutoff:
                queue.popleft()
            queue.append(frame.ts_us)
            return True, 0
        return False, 0


@dataclass(frozen=True, slots=True)
class FloodEvent:
    ts_us: int
    requesters: tuple[str, ...]     # buffer contents, oldest first
    request_times: tuple[int, ...]
    frame_numbers: tuple[int, ...]


class AuthFloodDetector:
    def __init__(self, cfg: DetectorConfig, ledger: RequestLedger):
        self.cfg = cfg
        self.ledger = ledger
        self._ring: deque[tuple[int, str, int]] = deque(maxlen=cfg.flood_buffer_len)
        self._pending: deque[FloodEvent] = deque()
        self._confirmed: deque[FloodEvent] = deque()
        self._window_counts: list[int] = []
        self.event_times: list[int] = []    # every abnormal event, oracle-comparable
        self.confirmed_total = 0
        self.cancelled_total = 0

    def on_frame(self, frame: FrameRecord, counted: bool) -> Alert | None:
        clock = frame.ts_us
        self._settle(clock)
        if counted:
            self._ring.append((frame.ts_us, frame.source_addr, frame.frame_number))
            if len(self._ring) == self.cfg.flood_buffer_len:
                span = self._ring[-1][0] - self._ring[0][0]
                if span < self.cfg.flood_window:
                    event = FloodEvent(
                        ts_us=frame.ts_us,
                        requesters=tuple(r[1] for r in self._ring),
                        request_times=tuple(r[0] for r in self._ring),
                        frame_numbers=tuple(r[2] for r in self._ring),
                    )
                    self.event_times.append(event.ts_us)
                    self._pending.append(event)
        return self._evaluate(clock, frame.frame_number)

    def _settle(self, clock: int) -> None:
        wait = self.cfg.flood_success_wait
        while self._pending and self._pending[0].ts_us + wait <= clock:
            event = self._pending.popleft()
            successes = sum(
                1
                for addr, req_ts in zip(event.requesters, event.request_times)
                if self.ledger.success_time.get(addr, -1) >= req_ts
            )
            if successes >= self.cfg.flood_success_majority:
                self.cancelled_total += 1
                continue
            self.confirmed_total += 1
            if not self._confirmed:
                self._window_counts = [0] * self.cfg.flood_windows
            slot = (event.ts_us - self._confirmed[0].ts_us) // MINUTE if self._confirmed else 0
            if slot < len(self._window_counts):
                self._window_counts[slot] += 1
            self._confirmed.append(event)

    def _recount(self) -> None:
        self._window_counts = [0] * self.cfg.flood_windows
        if not self._confirmed:
            return
        anchor = self._confirmed[0].ts_us
        for event in self._confirmed:
            slot = (event.ts_us - anchor) // MINUTE
            if slot < len(self._window_counts):
                self._window_counts[slot] += 1

    def _evaluate(self, clock: int, frame_number: int) -> Alert | None:
        quota = self.cfg.flood_events_per_min
        wait = self.cfg.flood_success_wait
        while self._confirmed:
            anchor = self._confirmed[0].ts_us
            undecided = False
            failed = False
            for slot, count in enumerate(self._window_counts):
                if count >= quota:
                    continue
                window_end = anchor + (slot + 1) * MINUTE
                # events inside the window settle at most `wait` after it ends
                if clock >= window_end + wait:
                    failed = True
                else:
                    undecided = True
                break
            if failed:
                self._confirmed.popleft()
                self._recount()
                continue
            if undecided or clock < anchor + self.cfg.flood_sustain:
                return None
            first = self._confirmed[0]
            victims = tuple(dict.fromkeys(first.requesters))
            alert = Alert(
                kind=AlertKind.AUTH_FLOOD,
                detected_at_us=clock,
                victim_addrs=victims,
                evidence_frames=first.frame_numbers + (frame_number,),
                detail=(f"connection requests above {self._rate_per_s():g}/s "
                        f"sustained for {self.cfg.flood_sustain // MINUTE} min"),
            )
            self._confirmed.clear()
            self._pending.clear()
            self._window_counts = []
            return alert
        return None

    def _rate_per_s(self) -> float:
        # quoted the way the design states it: N frames per window
        return self.cfg.flood_buffer_len * 1_000_000 / self.cfg.flood_window
