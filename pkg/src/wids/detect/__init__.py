"""Detection engine and the six signature designs it runs."""

from .alerts import Alert, AlertKind, read_alert_log, write_alert_log
from .config import DetectorConfig, load_config
from .engine import ApRestarted, Event, IdsEngine, NmsUpdate

__all__ = [
    "Alert",
    "AlertKind",
    "ApRestarted",
    "DetectorConfig",
    "Event",
    "IdsEngine",
    "NmsUpdate",
    "load_config",
    "read_alert_log",
    "write_alert_log",
]
