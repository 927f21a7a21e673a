"""Request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class AlertModel(BaseModel):
    kind: str
    time: str
    victims: list[str]
    evidence: list[int]
    detail: str = ""


class AnalyzeResponse(BaseModel):
    input_name: str
    frames_processed: int
    frames_skipped: int
    alerts: list[AlertModel]
    detector_events: dict[str, int]
    affected_clients: int
    rogue_identities: int
    elapsed_s: float
    notes: list[str] = Field(default_factory=list)


class SynthRequest(BaseModel):
    scenario: str = Field(description="scenario spec, flat key = value text")
    seed: int | None = None
    format: str = Field(default="pcap", pattern="^(pcap|csv)$")


class SynthInfo(BaseModel):
    kind: str
    frames: int
    duration_s: float


class ReportRequest(BaseModel):
    alert_log: str = Field(description="alert log content, JSON lines")


class ReportResponse(BaseModel):
    summary: str
    kinds: dict[str, int]


class HealthResponse(BaseModel):
    status: str
    version: str
