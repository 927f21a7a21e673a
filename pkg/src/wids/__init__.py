"""Signature-based intrusion detection for WPA3 management traffic.

The package splits into a frame model (frames), capture ingestion (pcapio,
csvio, dot11), the detection engine (detect), a deterministic attack-trace
synthesizer (synth), mitigation bookkeeping (mitigate), and two front ends:
a CLI (cli) and a small HTTP service (api) wrapping the same pipeline.
"""

from .detect.alerts import Alert, AlertKind
from .detect.config import DetectorConfig
from .detect.engine import ApRestarted, IdsEngine, NmsUpdate
from .frames import DispatchClass, FrameRecord, classify, is_connection_request

__version__ = "0.1.0"

__all__ = [
    "Alert",
    "AlertKind",
    "ApRestarted",
    "DetectorConfig",
    "DispatchClass",
    "FrameRecord",
    "IdsEngine",
    "NmsUpdate",
    "classify",
    "is_connection_request",
    "__version__",
]
