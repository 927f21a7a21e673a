"""Detection engine: routing, control signals, cooldown, bookkeeping.

The engine is a pure function of its input event stream: frames and control
signals go in (in timestamp order), alerts come out.  Processing a trace
frame by frame or as one batch gives identical results, and two runs over
the same input produce byte-identical alert logs.

Frames arriving more than REORDER_SLACK_US behind the clock are dropped
with a warning; anything within the slack is processed in arrival order.
Retransmissions are counted and delivered to no detector.  Emitted alerts
are rate-limited per (kind, victim set) by alert_cooldown; detector state
always sees every detection, only emission is suppressed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Union

from ..frames import DispatchClass, FrameRecord, classify
from .alerts import Alert, AlertKind
from .beacon_flood import BeaconFloodDetector
from .commit_race import CommitRaceDetector
from .config import DetectorConfig
from .deauth import DeauthRaceDetector
from .downgrade import DowngradeDetector
from .flood import AuthFloodDetector, RequestLedger
from .timing import TimingDetector

log = logging.getLogger(__name__)

# out-of-order tolerance: frames this far behind the clock still process
REORDER_SLACK_US = 1_000


@dataclass(frozen=True, slots=True)
class ApRestarted:
    """Operator signal: the protected AP was restarted on purpose."""

    ts_us: int


@dataclass(frozen=True, slots=True)
class NmsUpdate:
    """Management-system signal: these AP identities are authorized."""

    entries: tuple[tuple[str, str], ...]
    ts_us: int


Event = Union[FrameRecord, ApRestarted, NmsUpdate]


class IdsEngine:
    def __init__(self, cfg: DetectorConfig | None = None):
        self.cfg = cfg or DetectorConfig()
        self.ledger = RequestLedger(self.cfg)
        self.flood = AuthFloodDetector(self.cfg, self.ledger)
        self.timing = TimingDetector(self.cfg)
        self.downgrade = DowngradeDetector(self.cfg)
        self.deauth = DeauthRaceDetector(self.cfg)
        self.race = CommitRaceDetector(self.cfg)
        self.beacons = BeaconFloodDetector(self.cfg)
        self.clock: int | None = None
        self.alerts: list[Alert] = []
        self.frames_processed = 0
        self.retries_ignored = 0
        self.dropped_out_of_order = 0
        self.disassoc_logged = 0
        self.suppressed = 0
        self._last_emit: dict[tuple[AlertKind, frozenset], int] = {}

    # ------------------------------------------------------------------
    # event intake

    def process(self, frame: FrameRecord) -> list[Alert]:
        """Feed one frame; returns the alerts it emitted (often empty)."""
        if self.clock is not None and frame.ts_us < self.clock - REORDER_SLACK_US:
            self.dropped_out_of_order += 1
            log.warning("dropping frame %d: %d us behind the stream clock",
                        frame.frame_number, self.clock - frame.ts_us)
            return []
        self.clock = frame.ts_us if self.clock is None else max(self.clock, frame.ts_us)
        self.frames_processed += 1
        if frame.is_retry:
            self.retries_ignored += 1
            return []

        detections: list[Alert] = []
        cls = classify(frame)
        if cls is DispatchClass.ADVERTISEMENT:
            hit = self.downgrade.on_frame(frame)
            if hit is not None:
                detections.append(hit)
            detections.extend(self.beacons.on_frame(frame))
        elif cls is DispatchClass.AUTHENTICATION:
            counted, cancelled = self.ledger.observe(frame)
            hit = self.flood.on_frame(frame, counted)
            if hit is not None:
                detections.append(hit)
                self.timing.reset()  # the flood signature subsumes this one
            hit = self.timing.on_frame(frame, counted, cancelled)
            if hit is not None:
                detections.append(hit)
            detections.extend(self.race.on_frame(frame))
        elif cls in (DispatchClass.ASSOCIATION, DispatchClass.EAPOL):
            hit = self.deauth.on_connection_frame(frame)
            if hit is not None:
                detections.append(hit)
        elif cls is DispatchClass.DEAUTH:
            hit = self.deauth.on_deauth(frame)
            if hit is not None:
                detections.append(hit)
        elif cls is DispatchClass.DISASSOC:
            self.disassoc_logged += 1
            log.info("disassociation %s -> %s (frame %d)",
                     frame.source_addr, frame.receiver_addr, frame.frame_number)
        return [a for a in detections if self._emit(a)]

    def ap_restarted(self, ts_us: int) -> None:
        log.info("control signal: AP restarted at %d", ts_us)
        self.downgrade.on_restart(ts_us)
        self.beacons.on_restart(ts_us)

    def nms_update(self, entries: Iterable[tuple[str, str]], ts_us: int) -> None:
        entries = tuple(entries)
        log.info("control signal: %d authorized identities at %d", len(entries), ts_us)
        self.beacons.on_nms(entries, ts_us)

    def handle(self, event: Event) -> list[Alert]:
        if isinstance(event, FrameRecord):
            return self.process(event)
        if isinstance(event, ApRestarted):
            self.ap_restarted(event.ts_us)
        elif isinstance(event, NmsUpdate):
            self.nms_update(event.entries, event.ts_us)
        else:
            raise TypeError(f"not an engine event: {type(event).__name__}")
        return []

    def run(self, events: Iterable[Event]) -> list[Alert]:
        """Process a whole stream; equals concatenating process() calls."""
        out: list[Alert] = []
        for event in events:
            out.extend(self.handle(event))
        return out

    # ------------------------------------------------------------------
    # emission

    def _emit(self, alert: Alert) -> bool:
        key = (alert.kind, frozenset(alert.victim_addrs))
        last = self._last_emit.get(key)
        if last is not None and alert.detected_at_us - last < self.cfg.alert_cooldown:
            self.suppressed += 1
            return False
        self._last_emit[key] = alert.detected_at_us
        self.alerts.append(alert)
        return True

    # ------------------------------------------------------------------
    # reporting

    def summary(self) -> dict[str, int]:
        return {
            "frames_processed": self.frames_processed,
            "retries_ignored": self.retries_ignored,
            "dropped_out_of_order": self.dropped_out_of_order,
            "disassociations_logged": self.disassoc_logged,
            "alerts_emitted": len(self.alerts),
            "alerts_suppressed_by_cooldown": self.suppressed,
            "flood_abnormal_events": len(self.flood.event_times),
            "flood_events_confirmed": self.flood.confirmed_total,
            "flood_events_cancelled": self.flood.cancelled_total,
            "downgrade_events": self.downgrade.event_total,
            "deauth_race_events": self.deauth.event_total,
            "commit_races": self.race.race_total,
            "timing_counter": self.timing.counter,
            "beacon_abnormal_events": len(self.beacons.beacon_event_times),
            "probe_abnormal_events": len(self.beacons.probe_event_times),
        }
