"""Request/response bodies for the HTTP service."""

from __future__ import annotations

from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class CreateSessionRequest(BaseModel):
    symbols: List[int] = Field(default_factory=list)
    sigma: int = Field(ge=1)
    alpha: str = Field(description="fixed build threshold, e.g. '1/4'")


class SessionInfo(BaseModel):
    session_id: str
    n: int
    sigma: int
    alpha: str


class MajorityQueryRequest(BaseModel):
    l: int
    r: int
    beta: Optional[str] = Field(
        default=None, description="query threshold; defaults to build alpha")


class MajorityQueryResponse(BaseModel):
    majorities: List[int]


class MinorityQueryRequest(BaseModel):
    l: int
    r: int


class MinorityQueryResponse(BaseModel):
    minority: Optional[int]


class InsertRequest(BaseModel):
    i: int
    c: int


class DeleteRequest(BaseModel):
    i: int


class UpdateResponse(BaseModel):
    n: int
    symbol: Optional[int] = None


class RunWorkloadRequest(BaseModel):
    text_b64: str = Field(description="base64 raw text bytes")
    alpha: str
    workload_lines: List[str]


class RunWorkloadResponse(BaseModel):
    exit_code: int
    error: Optional[str] = None
    results: List[str] = Field(default_factory=list)
    report: Optional[dict] = None


class BenchRequest(BaseModel):
    n: int
    sigma: int
    alpha: str
    ops: int
    seed: int
    dist: str = "uniform"


class FreezeRequest(BaseModel):
    text_b64: str
    alpha: str


class FreezeResponse(BaseModel):
    snapshot_b64: str
    n: int
    sigma: int


class StaticQueryRequest(BaseModel):
    snapshot_b64: str
    l: int
    r: int
    alpha: Optional[str] = Field(
        default=None,
        description="majority threshold; omit for a minority query")


class StaticQueryResponse(BaseModel):
    majorities: Optional[List[int]] = None
    minority: Optional[int] = None


class SpaceResponse(BaseModel):
    space: Dict
