"""Scenario-driven trace synthesis."""

from .gen import (
    RSN_PSK,
    RSN_SAE,
    RSN_TRANSITION,
    TraceBuilder,
    gen,
)
from .scenarios import (
    BENIGN_KINDS,
    DEFAULT_T0_US,
    Scenario,
    ScenarioKind,
    load_scenario,
    parse_scenario,
)

__all__ = [
    "BENIGN_KINDS",
    "DEFAULT_T0_US",
    "RSN_PSK",
    "RSN_SAE",
    "RSN_TRANSITION",
    "Scenario",
    "ScenarioKind",
    "TraceBuilder",
    "gen",
    "load_scenario",
    "parse_scenario",
]
