"""Scenario descriptions for the trace synthesizer.

A Scenario plus a seed fully determines a trace: generation is a pure
function, so the same description always yields byte-identical captures.
Scenario files use the same flat key = value format as detector configs.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from enum import Enum
from pathlib import Path

from ..detect.config import parse_flat
from ..errors import ConfigError, InvalidScenario
from ..frames import mac

# 2021-06-01 00:00:00 UTC; any fixed origin works, this one reads nicely
DEFAULT_T0_US = 1_622_505_600_000_000


class ScenarioKind(str, Enum):
    # benign baselines
    BENIGN_CONNECT = "benign_connect"
    AP_RESTART_STORM = "ap_restart_storm"
    TRANSITION_BEACONS = "transition_beacons"
    RECONFIG_GAP = "reconfig_gap"
    GROUP_REJECTION = "group_rejection"
    # attacks
    AUTH_FLOOD = "auth_flood"
    TRY_WPA2 = "try_wpa2"
    DOWNGRADE_TRANSITION = "downgrade_transition"
    COMMIT_OUT_OF_RANGE = "commit_out_of_range"
    GROUP_UNSUPPORTED = "group_unsupported"
    GROUP_DOWNGRADE = "group_downgrade"
    TIMING_PROBES = "timing_probes"
    DEAUTH_RACE = "deauth_race"
    BEACON_FLOOD = "beacon_flood"
    PROBE_FLOOD = "probe_flood"
    ROGUE_AP = "rogue_ap"


BENIGN_KINDS = frozenset({
    ScenarioKind.BENIGN_CONNECT,
    ScenarioKind.AP_RESTART_STORM,
    ScenarioKind.TRANSITION_BEACONS,
    ScenarioKind.RECONFIG_GAP,
    ScenarioKind.GROUP_REJECTION,
})


@dataclass(frozen=True)
class Scenario:
    kind: ScenarioKind
    seed: int = 0
    t0_us: int = DEFAULT_T0_US
    ssid: str = "lab-net"
    bssid: str = "02:00:00:00:01:01"

    n_clients: int = 1              # connect / storm scenarios
    storm_window_s: float = 60.0    # restart storm spread

    rate_fps: float = 20.0          # flood request or beacon rate
    duration_s: float = 240.0       # flood / beacon scenario length

    repetitions: int = 3            # race attack repetitions
    groups: tuple[int, ...] = ()    # SAE groups, per-kind defaults apply
    probe_count: int = 500          # timing side-channel request count

    attack_delay_s: float = 5.0     # quiet lead-in before the attack
    gap_s: float = 15.0             # silence in the reconfiguration baseline
    beacon_interval_tu: int = 100   # legitimate beacon cadence
    attacker_interval_tu: int = 16  # spoofed beacon cadence

    mode: str = "random"            # beacon flood SSIDs: random | confusing
    n_identities: int = 200         # distinct identities in a flood burst
    burst_s: float = 2.0            # flood burst length
    learning_lead_s: float = 185.0  # authorized-only traffic before the burst

    def __post_init__(self):
        object.__setattr__(self, "bssid", mac(self.bssid))
        if self.rate_fps <= 0:
            raise InvalidScenario("rate_fps must be positive")
        if self.duration_s <= 0 or self.burst_s <= 0:
            raise InvalidScenario("durations must be positive")
        if self.n_clients < 1:
            raise InvalidScenario("n_clients must be at least 1")
        if self.repetitions < 1:
            raise InvalidScenario("repetitions must be at least 1")
        if self.probe_count < 1:
            raise InvalidScenario("probe_count must be at least 1")
        if self.mode not in ("random", "confusing"):
            raise InvalidScenario(f"unknown beacon flood mode {self.mode!r}")
        if self.n_identities < 1:
            raise InvalidScenario("n_identities must be at least 1")
        if not 0 < len(self.ssid.encode()) <= 32:
            raise InvalidScenario("ssid must be 1..32 bytes")
        if any(not 0 < g < 0x10000 for g in self.groups):
            raise InvalidScenario("groups must be 16-bit registry ids")


_FIELD_TYPES = {f.name: f.type for f in fields(Scenario)}


def _convert(name: str, value: str):
    ftype = _FIELD_TYPES[name]
    if name == "kind":
        try:
            return ScenarioKind(value)
        except ValueError:
            raise InvalidScenario(f"unknown scenario kind {value!r}") from None
    if name == "groups":
        return tuple(int(g) for g in value.split(",") if g.strip())
    if ftype == "int":
        return int(value)
    if ftype == "float":
        return float(value)
    return value


def parse_scenario(text: str) -> Scenario:
    """Parse a scenario file; raises InvalidScenario on any problem."""
    try:
        raw = parse_flat(text)
    except ConfigError as exc:
        raise InvalidScenario(str(exc)) from None
    if "kind" not in raw:
        raise InvalidScenario("scenario file needs a kind")
    kwargs = {}
    for key, value in raw.items():
        if key not in _FIELD_TYPES:
            raise InvalidScenario(f"unknown scenario key: {key}")
        try:
            kwargs[key] = _convert(key, value)
        except ValueError:
            raise InvalidScenario(f"{key}: bad value {value!r}") from None
    return Scenario(**kwargs)


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(Path(path).read_text())
