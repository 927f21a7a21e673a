"""End-to-end analysis runs: sniff the input format, stream frames through
the detection engine, collect a run report."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from .csvio import read_csv
from .detect import Alert, DetectorConfig, IdsEngine
from .detect.alerts import iso_time
from .frames import FrameRecord
from .mitigate import AuthorizedApSource, ClientNoticeRegistry, RogueRegistry
from .pcapio import read_pcap

log = logging.getLogger(__name__)

_PCAP_MAGICS = {
    b"\xd4\xc3\xb2\xa1", b"\xa1\xb2\xc3\xd4",
    b"\x4d\x3c\xb2\xa1", b"\xa1\xb2\x3c\x4d",
    b"\x0a\x0d\x0d\x0a",
}


def sniff_format(path: str | Path) -> str:
    """Decide pcap vs CSV from the magic number, falling back to the
    extension for empty or ambiguous files."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head in _PCAP_MAGICS:
        return "pcap"
    if path.suffix.lower() in (".pcap", ".pcapng", ".cap"):
        return "pcap"
    return "csv"


def load_frames(path: str | Path) -> tuple[list[FrameRecord], int]:
    """Read a capture in either format; returns (frames, skipped count)."""
    fmt = sniff_format(path)
    if fmt == "pcap":
        with open(path, "rb") as fh:
            frames, stats = read_pcap(fh)
        skipped = stats.malformed_frames + stats.skipped_interfaces
    else:
        with open(path, newline="") as fh:
            frames, cstats = read_csv(fh)
        skipped = cstats.malformed_rows
    return frames, skipped


@dataclass
class RunReport:
    input_path: str
    frames_total: int
    frames_processed: int
    frames_skipped: int
    alerts: list[Alert]
    detector_events: dict[str, int]
    elapsed_s: float
    affected_clients: int = 0
    rogue_identities: int = 0
    notes: list[str] = field(default_factory=list)


def analyze_file(input_path: str | Path, cfg: DetectorConfig | None = None,
                 nms_path: str | Path | None = None) -> RunReport:
    started = time.monotonic()
    frames, skipped = load_frames(input_path)
    engine = IdsEngine(cfg)
    notices = ClientNoticeRegistry()
    rogues = RogueRegistry()
    notes = []

    if nms_path is not None:
        source = AuthorizedApSource(nms_path)
        poll_at = frames[0].ts_us if frames else 0
        _, signals = source.refresh(poll_at)
        if source.stale:
            notes.append("authorized-AP source unavailable; starting cold")
        for signal in signals:
            engine.handle(signal)

    alerts: list[Alert] = []
    for frame in frames:
        for alert in engine.process(frame):
            alerts.append(alert)
            notices.record_affected(alert)
            if alert.kind.value == "RogueAp":
                rogues.mark_rogue(alert)

    summary = engine.summary()
    dropped = summary.pop("dropped_out_of_order")
    if dropped:
        notes.append(f"{dropped} frames dropped as out of order")
    return RunReport(
        input_path=str(input_path),
        frames_total=len(frames) + skipped,
        frames_processed=summary.pop("frames_processed"),
        frames_skipped=skipped + dropped,
        alerts=alerts,
        detector_events=summary,
        elapsed_s=time.monotonic() - started,
        affected_clients=len(notices),
        rogue_identities=len(rogues),
        notes=notes,
    )


def render_report(report: RunReport) -> str:
    lines = [
        f"input: {report.input_path}",
        f"frames: {report.frames_processed} processed, "
        f"{report.frames_skipped} skipped",
        f"alerts: {len(report.alerts)}",
    ]
    for alert in report.alerts:
        lines.append("  " + alert.to_json_line())
    active = {k: v for k, v in report.detector_events.items() if v}
    if active:
        lines.append("detector events: " + ", ".join(
            f"{k}={v}" for k, v in sorted(active.items())))
    if report.affected_clients:
        lines.append(f"affected clients: {report.affected_clients}")
    if report.rogue_identities:
        lines.append(f"rogue identities: {report.rogue_identities}")
    for note in report.notes:
        lines.append("note: " + note)
    lines.append(f"elapsed: {report.elapsed_s:.3f}s")
    return "\n".join(lines)


def summarize_alerts(alerts: list[Alert]) -> str:
    """Per-kind summary table for the report command."""
    if not alerts:
        return "no alerts"
    groups: dict[str, list[Alert]] = {}
    for alert in alerts:
        groups.setdefault(alert.kind.value, []).append(alert)
    header = f"{'kind':<20} {'count':>5}  {'first':<32}  {'last':<32}  victims"
    lines = [header, "-" * len(header)]
    for kind in sorted(groups):
        batch = groups[kind]
        victims = sorted({v for a in batch for v in a.victim_addrs})
        shown = ", ".join(victims[:3])
        if len(victims) > 3:
            shown += f" (+{len(victims) - 3} more)"
        lines.append(
            f"{kind:<20} {len(batch):>5}  "
            f"{iso_time(min(a.detected_at_us for a in batch)):<32}  "
            f"{iso_time(max(a.detected_at_us for a in batch)):<32}  {shown}")
    return "\n".join(lines)
