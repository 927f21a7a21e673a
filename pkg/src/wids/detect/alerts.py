"""Alert records and their line-delimited serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from enum import Enum

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


class AlertKind(str, Enum):
    AUTH_FLOOD = "AuthFlood"
    WPA2_DOWNGRADE = "Wpa2Downgrade"
    DEAUTH_RACE = "DeauthRace"
    GROUP_UNSUPPORTED = "GroupUnsupported"
    COMMIT_OUT_OF_RANGE = "CommitOutOfRange"
    GROUP_DOWNGRADE = "GroupDowngrade"
    TIMING_SIDE_CHANNEL = "TimingSideChannel"
    BEACON_FLOOD = "BeaconFlood"
    PROBE_FLOOD = "ProbeFlood"
    ROGUE_AP = "RogueAp"


def iso_time(ts_us: int) -> str:
    """Render microseconds since the epoch as UTC ISO-8601, exact."""
    return (_EPOCH + timedelta(microseconds=ts_us)).isoformat()


def from_iso_time(text: str) -> int:
    dt = datetime.fromisoformat(text)
    return round((dt - _EPOCH).total_seconds() * 1_000_000)


@dataclass(frozen=True, slots=True)
class Alert:
    """One detection result.

    detected_at_us always equals the capture timestamp of one of the
    evidence frames: alerts are anchored to observed traffic, never to
    wall-clock time.
    """

    kind: AlertKind
    detected_at_us: int
    victim_addrs: tuple[str, ...]
    evidence_frames: tuple[int, ...]
    detail: str = ""

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "kind": self.kind.value,
                "time": iso_time(self.detected_at_us),
                "victims": list(self.victim_addrs),
                "evidence": list(self.evidence_frames),
                "detail": self.detail,
            },
            sort_keys=True, separators=(",", ":"),
        )

    @classmethod
    def from_json_line(cls, line: str) -> "Alert":
        raw = json.loads(line)
        return cls(
            kind=AlertKind(raw["kind"]),
            detected_at_us=from_iso_time(raw["time"]),
            victim_addrs=tuple(raw["victims"]),
            evidence_frames=tuple(raw["evidence"]),
            detail=raw.get("detail", ""),
        )


def write_alert_log(alerts, dest) -> None:
    for alert in alerts:
        dest.write(alert.to_json_line() + "\n")


def read_alert_log(source) -> list[Alert]:
    alerts = []
    for lineno, line in enumerate(source, 1):
        line = line.strip()
        if not line:
            continue
        try:
            alerts.append(Alert.from_json_line(line))
        except (ValueError, KeyError) as exc:
            raise ValueError(f"alert log line {lineno}: {exc}") from None
    return alerts
