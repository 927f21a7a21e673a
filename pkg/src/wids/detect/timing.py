"""Timing side-channel detection.

Dictionary attacks against the SAE password element probe the AP with many
commits that never complete, often from varying spoofed addresses, so the
signal is a single global counter of unsuccessful connection requests: a
commit counts when it arrives and is taken back if the AP answers that
client with a success confirm within flood_success_wait (the same
classification the flood detector uses, via RequestLedger).

The counter alerts once when it reaches timing_count_threshold, resets on a
fixed period, and also resets whenever an authentication flood is detected,
since a flood is itself made of unsuccessful requests.
"""

from __future__ import annotations

from ..frames import FrameRecord
from .alerts import Alert, AlertKind
from .config import DetectorConfig


class TimingDetector:
    def __init__(self, cfg: DetectorConfig):
        self.cfg = cfg
        self.counter = 0
        self._period_start: int | None = None

    def on_frame(self, frame: FrameRecord, counted: bool, cancelled: int) -> Alert | None:
        clock = frame.ts_us
        if self._period_start is None:
            self._period_start = clock
        while clock - self._period_start >= self.cfg.timing_reset_period:
            self._period_start += self.cfg.timing_reset_period
            self.counter = 0
        if cancelled:
            self.counter = max(0, self.counter - cancelled)
        if not counted:
            return None
        self.counter += 1
        if self.counter != self.cfg.timing_count_threshold:
            return None
        return Alert(
            kind=AlertKind.TIMING_SIDE_CHANNEL,
            detected_at_us=clock,
            victim_addrs=(self.cfg.protected_bssid,),
            evidence_frames=(frame.frame_number,),
            detail=(f"{self.counter} unsuccessful connection requests "
                    "since the last counter reset"),
        )

    def reset(self) -> None:
        """Called when a flood is detected; floods subsume this signal."""
        self.counter = 0
