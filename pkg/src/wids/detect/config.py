"""Detector thresholds and their file representation.

All durations are integer microseconds internally; the config file speaks
seconds for readability.  Defaults are the operating values the detection
designs were written around: an 8-deep commit buffer inside 500 ms (a 16
frames/s trigger rate), confirmed events at least 10 times per minute for
3 minutes, two buffered beacons, 4 mismatches in 5 s, and so on.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from typing import TextIO

from ..errors import ConfigError
from ..frames import mac

SECOND = 1_000_000
MINUTE = 60 * SECOND

# config keys whose file value is seconds, stored as microseconds
_DURATION_FIELDS = {
    "flood_window", "flood_sustain", "flood_success_wait",
    "downgrade_span", "downgrade_ignore_gap",
    "deauth_follow_window", "deauth_race_span",
    "race_window", "timing_reset_period",
    "learning_period", "beaconflood_span",
    "rogue_min_persistence", "alert_cooldown",
}

# recognized keys that configure the surrounding pipeline, not the engine
PIPELINE_KEYS = {"nms_source"}


@dataclass
class DetectorConfig:
    protected_bssid: str = "02:00:00:00:01:01"
    protected_ssid: str = "lab-net"

    # authentication flood
    flood_buffer_len: int = 8                   # commits per sliding buffer
    flood_window: int = 500_000                 # buffer span strictly below this
    flood_events_per_min: int = 10              # confirmed events per minute window
    flood_sustain: int = 3 * MINUTE             # anchored windows to sustain
    flood_success_wait: int = 2 * SECOND        # settle time for the success check
    flood_success_majority: int = 5             # successes out of 8 cancel an event

    # WPA3 to WPA2 downgrade
    downgrade_beacon_buffer: int = 2
    downgrade_events: int = 4
    downgrade_span: int = 5 * SECOND
    downgrade_ignore_gap: int = 10 * SECOND     # beacon gap and restart-signal slack

    # deauthentication race
    deauth_follow_window: int = 3 * SECOND
    deauth_race_events: int = 2
    deauth_race_span: int = 10 * SECOND

    # commit rejection race
    race_window: int = 500_000

    # timing side channel
    timing_count_threshold: int = 500
    timing_reset_period: int = 24 * 3600 * SECOND

    # beacon and probe response floods
    learning_period: int = 180 * SECOND
    beaconflood_events: int = 5
    beaconflood_span: int = 10 * SECOND
    rogue_min_persistence: int = 30 * SECOND

    alert_cooldown: int = MINUTE

    def __post_init__(self):
        self.protected_bssid = mac(self.protected_bssid)
        if self.flood_buffer_len < 2:
            raise ConfigError("flood_buffer_len must be at least 2")
        if not 0 < self.flood_success_majority <= self.flood_buffer_len:
            raise ConfigError("flood_success_majority must fit the buffer length")

    @property
    def flood_windows(self) -> int:
        """Number of one-minute windows the flood must sustain."""
        return max(1, self.flood_sustain // MINUTE)


_FIELD_NAMES = {f.name for f in fields(DetectorConfig)}


def parse_flat(text: str) -> dict[str, str]:
    """Parse the flat `key = value` format with # comments."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key}")
        out[key] = value
    return out


def load_config(source: str | Path | TextIO | None) -> tuple[DetectorConfig, dict[str, str]]:
    """Load a DetectorConfig plus pipeline extras from a flat config file.

    None returns pure defaults.  Unknown keys are an error: a typo in a
    threshold name must not silently run with defaults.
    """
    if source is None:
        return DetectorConfig(), {}
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    else:
        text = source.read()
    raw = parse_flat(text)
    extras = {k: raw.pop(k) for k in list(raw) if k in PIPELINE_KEYS}
    kwargs: dict = {}
    for key, value in raw.items():
        if key not in _FIELD_NAMES:
            raise ConfigError(f"unknown config key: {key}")
        if key in ("protected_bssid", "protected_ssid"):
            kwargs[key] = value
        elif key in _DURATION_FIELDS:
            try:
                kwargs[key] = round(float(value) * SECOND)
            except ValueError:
                raise ConfigError(f"{key}: expected seconds, got {value!r}") from None
        else:
            try:
                kwargs[key] = int(value)
            except ValueError:
                raise ConfigError(f"{key}: expected an integer, got {value!r}") from None
    try:
        return DetectorConfig(**kwargs), extras
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
