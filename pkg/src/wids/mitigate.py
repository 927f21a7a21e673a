"""Post-detection bookkeeping.

Three registries stand in for the operational hooks downstream of the
detectors: which clients to notify, which APs are authorized right now,
and which beacon identities have been marked rogue.  None of them touch
the network; the NMS is a pollable document and notification delivery is
out of scope, so everything reduces to deterministic record keeping.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .detect.alerts import Alert, iso_time
from .detect.engine import ApRestarted, Event, NmsUpdate
from .errors import SourceUnavailable
from .frames import mac

log = logging.getLogger(__name__)


@dataclass
class ClientNotice:
    client: str
    alert_kind: str
    first_seen_us: int
    last_seen_us: int
    count: int = 1


class ClientNoticeRegistry:
    """One entry per (client, alert kind); replaying the same alerts gives
    the same registry."""

    def __init__(self):
        self._entries: dict[tuple[str, str], ClientNotice] = {}
        self.notice_log: list[str] = []

    def record_affected(self, alert: Alert) -> list[ClientNotice]:
        touched = []
        for client in alert.victim_addrs:
            key = (client, alert.kind.value)
            entry = self._entries.get(key)
            if entry is None:
                entry = ClientNotice(client, alert.kind.value,
                                     alert.detected_at_us,
                                     alert.detected_at_us)
                self._entries[key] = entry
            else:
                entry.count += 1
                entry.last_seen_us = alert.detected_at_us
            self.notice_log.append(json.dumps(
                {"client": client, "kind": alert.kind.value,
                 "time": iso_time(alert.detected_at_us),
                 "count": entry.count},
                sort_keys=True, separators=(",", ":")))
            touched.append(entry)
        return touched

    def entries(self) -> list[ClientNotice]:
        return sorted(self._entries.values(),
                      key=lambda e: (e.client, e.alert_kind))

    def __len__(self):
        return len(self._entries)


STATUS_ACTIVE = "active"
STATUS_RESTARTED = "restarted"
STATUS_NEW = "new"
_STATUSES = {STATUS_ACTIVE, STATUS_RESTARTED, STATUS_NEW}


@dataclass
class ApEntry:
    bssid: str
    ssid: str
    status: str
    ts_us: int


class AuthorizedApSource:
    """Authorized-AP list behind a pollable document.

    Line format: bssid,ssid,status,timestamp_us with status one of
    active / restarted / new.  Each Restarted or New transition (a status
    timestamp newer than what the previous poll saw) yields exactly one
    control signal; an unreadable document keeps the previous entries and
    logs a warning instead of failing the session.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._entries: dict[str, ApEntry] = {}
        self._seen_ts: dict[str, int] = {}
        self.stale = False

    @property
    def entries(self) -> list[ApEntry]:
        return sorted(self._entries.values(), key=lambda e: e.bssid)

    def authorized_set(self) -> set[tuple[str, str]]:
        return {(e.bssid, e.ssid) for e in self._entries.values()}

    def _parse(self, text: str) -> dict[str, ApEntry]:
        entries: dict[str, ApEntry] = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 4 or parts[2] not in _STATUSES:
                raise SourceUnavailable(
                    f"{self.path}:{lineno}: bad authorized-AP record")
            bssid = mac(parts[0])
            entry = ApEntry(bssid, parts[1], parts[2], int(parts[3]))
            prev = entries.get(bssid)
            # entries unique by bssid: the newest record wins
            if prev is None or entry.ts_us >= prev.ts_us:
                entries[bssid] = entry
        return entries

    def refresh(self, now_us: int) -> tuple[set[tuple[str, str]], list[Event]]:
        try:
            parsed = self._parse(self.path.read_text())
        except (OSError, ValueError, SourceUnavailable) as exc:
            self.stale = True
            log.warning("authorized-AP source unavailable, keeping %d "
                        "stale entries: %s", len(self._entries), exc)
            return self.authorized_set(), []
        self.stale = False
        signals: list[Event] = []
        added = False
        for bssid, entry in parsed.items():
            last = self._seen_ts.get(bssid)
            fresh = last is None or entry.ts_us > last
            if entry.status == STATUS_RESTARTED and fresh and last is not None:
                signals.append(ApRestarted(ts_us=min(entry.ts_us, now_us)))
            if (entry.status == STATUS_NEW and fresh) or last is None:
                added = True
            self._seen_ts[bssid] = max(entry.ts_us, last or 0)
        if added or set(parsed) != set(self._entries):
            signals.append(NmsUpdate(
                entries=tuple(sorted((e.bssid, e.ssid)
                                     for e in parsed.values())),
                ts_us=now_us))
        self._entries = parsed
        return self.authorized_set(), signals


@dataclass
class RogueRecord:
    bssid: str
    ssid: str
    first_seen_us: int
    last_seen_us: int
    alerts: int = 1


class RogueRegistry:
    """Rogue beacon identities, one record each; recording only, there is
    no banning to enforce."""

    def __init__(self):
        self._records: dict[tuple[str, str], RogueRecord] = {}

    def mark_rogue(self, alert: Alert, ssid: str = "") -> RogueRecord:
        bssid = alert.victim_addrs[0]
        key = (bssid, ssid)
        rec = self._records.get(key)
        if rec is None:
            rec = RogueRecord(bssid, ssid, alert.detected_at_us,
                              alert.detected_at_us)
            self._records[key] = rec
        else:
            rec.alerts += 1
            rec.last_seen_us = alert.detected_at_us
        return rec

    def records(self) -> list[RogueRecord]:
        return sorted(self._records.values(),
                      key=lambda r: (r.first_seen_us, r.bssid))

    def __len__(self):
        return len(self._records)
