"""HTTP service wrapping the analysis pipeline.

Thin adapters only: every endpoint delegates to the same functions the CLI
uses, so the two front ends cannot drift apart.  Captures are uploaded
whole; there is no live-capture or streaming endpoint.
"""

from __future__ import annotations

import base64
import dataclasses
import io
import tempfile
from pathlib import Path

from fastapi import FastAPI, File, Form, HTTPException, UploadFile
from fastapi.responses import JSONResponse

from . import __version__
from .csvio import write_csv
from .detect import DetectorConfig, load_config, read_alert_log
from .detect.alerts import iso_time
from .errors import WidsError
from .pcapio import pcap_bytes
from .pipeline import analyze_file, summarize_alerts
from .schemas import (
    AlertModel,
    AnalyzeResponse,
    HealthResponse,
    ReportRequest,
    ReportResponse,
    SynthInfo,
    SynthRequest,
)
from .synth import gen, parse_scenario

app = FastAPI(title="wids", version=__version__)


def _bad_request(exc: Exception) -> HTTPException:
    return HTTPException(status_code=400, detail=str(exc))


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/analyze", response_model=AnalyzeResponse)
async def analyze(capture: UploadFile = File(...),
                  config: str | None = Form(None)) -> AnalyzeResponse:
    try:
        cfg = load_config(io.StringIO(config))[0] if config else DetectorConfig()
    except WidsError as exc:
        raise _bad_request(exc) from None
    data = await capture.read()
    suffix = Path(capture.filename or "capture.pcap").suffix or ".pcap"
    with tempfile.NamedTemporaryFile(suffix=suffix) as tmp:
        tmp.write(data)
        tmp.flush()
        try:
            report = analyze_file(tmp.name, cfg)
        except WidsError as exc:
            raise _bad_request(exc) from None
    return AnalyzeResponse(
        input_name=capture.filename or "capture",
        frames_processed=report.frames_processed,
        frames_skipped=report.frames_skipped,
        alerts=[AlertModel(kind=a.kind.value,
                           time=iso_time(a.detected_at_us),
                           victims=list(a.victim_addrs),
                           evidence=list(a.evidence_frames),
                           detail=a.detail)
                for a in report.alerts],
        detector_events=report.detector_events,
        affected_clients=report.affected_clients,
        rogue_identities=report.rogue_identities,
        elapsed_s=report.elapsed_s,
        notes=report.notes,
    )


@app.post("/synth")
def synth(req: SynthRequest) -> JSONResponse:
    try:
        scenario = parse_scenario(req.scenario)
        if req.seed is not None:
            scenario = dataclasses.replace(scenario, seed=req.seed)
        frames = gen(scenario)
    except WidsError as exc:
        raise _bad_request(exc) from None
    if req.format == "pcap":
        payload = pcap_bytes(frames)
    else:
        buf = io.StringIO()
        write_csv(frames, buf)
        payload = buf.getvalue().encode()
    span = (frames[-1].ts_us - frames[0].ts_us) / 1e6 if frames else 0.0
    info = SynthInfo(kind=scenario.kind.value, frames=len(frames),
                     duration_s=span)
    return JSONResponse({
        "info": info.model_dump(),
        "format": req.format,
        "trace_base64": base64.b64encode(payload).decode(),
    })


@app.post("/report", response_model=ReportResponse)
def report(req: ReportRequest) -> ReportResponse:
    try:
        alerts = read_alert_log(io.StringIO(req.alert_log))
    except ValueError as exc:
        raise _bad_request(exc) from None
    kinds: dict[str, int] = {}
    for alert in alerts:
        kinds[alert.kind.value] = kinds.get(alert.kind.value, 0) + 1
    return ReportResponse(summary=summarize_alerts(alerts), kinds=kinds)
