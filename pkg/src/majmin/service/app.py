"""HTTP service exposing the dynamic indexes, workload runner, benchmarks,
and frozen snapshots.

Sessions hold mutable documents in process memory; each session is guarded
by a lock so mutations respect the single-writer contract.
"""

from __future__ import annotations

import base64
import binascii
import itertools
import threading
from fractions import Fraction

from fastapi import FastAPI, HTTPException

from ..bench import bench as run_bench
from ..bench import space_report
from ..document import Document
from ..errors import (
    EmptyWindow,
    LevelUnavailable,
    MalformedStream,
    PositionOutOfRange,
    ThresholdBelowBuildAlpha,
    ThresholdOutOfRange,
    TruncatedStream,
)
from ..static import (
    StaticMajorityIndex,
    StaticMinorityIndex,
    snapshot_bytes,
    snapshot_from_bytes,
)
from ..workload import run_workload_payload, text_to_symbols
from . import schemas

_DOMAIN_ERRORS = (
    PositionOutOfRange,
    ThresholdOutOfRange,
    ThresholdBelowBuildAlpha,
    LevelUnavailable,
    EmptyWindow,
    MalformedStream,
    TruncatedStream,
    ValueError,
    ZeroDivisionError,
)


def _parse_fraction(text, name):
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise HTTPException(400, f"bad {name}: {exc}") from exc
    if not 0 < value < 1:
        raise HTTPException(400, f"{name} {value} not in (0,1)")
    return value


def _decode_b64(text, name):
    try:
        return base64.b64decode(text, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise HTTPException(400, f"bad {name}: {exc}") from exc


class _Session:
    def __init__(self, doc: Document):
        self.doc = doc
        self.lock = threading.Lock()


def create_app() -> FastAPI:
    app = FastAPI(title="majmin", version="1.0")
    sessions: dict[str, _Session] = {}
    ids = itertools.count(1)
    registry_lock = threading.Lock()

    def get_session(session_id: str) -> _Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"no session {session_id}")
        return session

    def session_info(session_id, doc):
        return schemas.SessionInfo(
            session_id=session_id, n=doc.n, sigma=doc.sigma,
            alpha=str(doc.alpha))

    @app.post("/sessions", response_model=schemas.SessionInfo)
    def create_session(req: schemas.CreateSessionRequest):
        alpha = _parse_fraction(req.alpha, "alpha")
        if any(not 1 <= c <= req.sigma for c in req.symbols):
            raise HTTPException(400, "symbols must lie in 1..sigma")
        doc = Document(req.symbols, alpha, req.sigma)
        with registry_lock:
            session_id = str(next(ids))
            sessions[session_id] = _Session(doc)
        return session_info(session_id, doc)

    @app.get("/sessions/{session_id}", response_model=schemas.SessionInfo)
    def describe(session_id: str):
        return session_info(session_id, get_session(session_id).doc)

    @app.delete("/sessions/{session_id}")
    def drop(session_id: str):
        get_session(session_id)
        with registry_lock:
            sessions.pop(session_id, None)
        return {"dropped": session_id}

    @app.post("/sessions/{session_id}/query",
              response_model=schemas.MajorityQueryResponse)
    def query_majority(session_id: str, req: schemas.MajorityQueryRequest):
        session = get_session(session_id)
        beta = _parse_fraction(req.beta, "beta") if req.beta else None
        try:
            with session.lock:
                got = session.doc.query_majority(req.l, req.r, beta)
        except _DOMAIN_ERRORS as exc:
            raise HTTPException(400, str(exc)) from exc
        return schemas.MajorityQueryResponse(majorities=sorted(got))

    @app.post("/sessions/{session_id}/minority",
              response_model=schemas.MinorityQueryResponse)
    def query_minority(session_id: str, req: schemas.MinorityQueryRequest):
        session = get_session(session_id)
        try:
            with session.lock:
                got = session.doc.query_minority(req.l, req.r)
        except _DOMAIN_ERRORS as exc:
            raise HTTPException(400, str(exc)) from exc
        return schemas.MinorityQueryResponse(minority=got)

    @app.post("/sessions/{session_id}/insert",
              response_model=schemas.UpdateResponse)
    def insert(session_id: str, req: schemas.InsertRequest):
        session = get_session(session_id)
        if not 1 <= req.c <= session.doc.sigma:
            raise HTTPException(400, f"symbol {req.c} not in 1..sigma")
        try:
            with session.lock:
                session.doc.insert(req.c, req.i)
        except _DOMAIN_ERRORS as exc:
            raise HTTPException(400, str(exc)) from exc
        return schemas.UpdateResponse(n=session.doc.n)

    @app.post("/sessions/{session_id}/delete",
              response_model=schemas.UpdateResponse)
    def delete(session_id: str, req: schemas.DeleteRequest):
        session = get_session(session_id)
        try:
            with session.lock:
                symbol = session.doc.delete(req.i)
        except _DOMAIN_ERRORS as exc:
            raise HTTPException(400, str(exc)) from exc
        return schemas.UpdateResponse(n=session.doc.n, symbol=symbol)

    @app.get("/sessions/{session_id}/space",
             response_model=schemas.SpaceResponse)
    def space(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return schemas.SpaceResponse(space=space_report(session.doc))

    @app.post("/run", response_model=schemas.RunWorkloadResponse)
    def run(req: schemas.RunWorkloadRequest):
        text = _decode_b64(req.text_b64, "text_b64")
        outcome = run_workload_payload(text, req.alpha, req.workload_lines)
        return schemas.RunWorkloadResponse(**outcome)

    @app.post("/bench")
    def bench_endpoint(req: schemas.BenchRequest):
        alpha = _parse_fraction(req.alpha, "alpha")
        try:
            return run_bench(req.n, req.sigma, alpha, req.ops, req.seed,
                             req.dist)
        except _DOMAIN_ERRORS as exc:
            raise HTTPException(400, str(exc)) from exc

    @app.post("/freeze", response_model=schemas.FreezeResponse)
    def freeze(req: schemas.FreezeRequest):
        alpha = _parse_fraction(req.alpha, "alpha")
        symbols, sigma = text_to_symbols(_decode_b64(req.text_b64, "text_b64"))
        try:
            majority = StaticMajorityIndex.freeze(symbols, sigma)
            minority = StaticMinorityIndex.freeze(symbols, alpha, sigma)
            blob = snapshot_bytes(majority, minority)
        except _DOMAIN_ERRORS as exc:
            raise HTTPException(400, str(exc)) from exc
        return schemas.FreezeResponse(
            snapshot_b64=base64.b64encode(blob).decode("ascii"),
            n=majority.n, sigma=majority.sigma)

    @app.post("/static/query", response_model=schemas.StaticQueryResponse)
    def static_query(req: schemas.StaticQueryRequest):
        blob = _decode_b64(req.snapshot_b64, "snapshot_b64")
        try:
            majority, minority = snapshot_from_bytes(blob)
            if req.alpha is not None:
                alpha = _parse_fraction(req.alpha, "alpha")
                got = majority.query(req.l, req.r, alpha)
                return schemas.StaticQueryResponse(majorities=sorted(got))
            return schemas.StaticQueryResponse(
                minority=minority.query(req.l, req.r))
        except _DOMAIN_ERRORS as exc:
            raise HTTPException(400, str(exc)) from exc

    return app
