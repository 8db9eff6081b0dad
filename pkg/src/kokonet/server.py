"""Local JSON-over-HTTP service exposing the design workflow.

Endpoints mirror the CLI: POST /qs, /classify, /flex, /search and
GET /bundle/{id}.  Responses reuse the same JSON schemas as the file
formats; bundles are cached in memory keyed by a content hash so the viewer
can fetch them back.  Stateless otherwise; binds localhost by default.
"""
from __future__ import annotations

import hashlib
import json
import math
import threading
from typing import Any, Optional

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import qsnet
from .classify import PUBLISHED_DIGITS_TOL, classify
from .errors import KokonetError
from .geometry import BundleSample, FlexionBundle, auto_edge_lengths, embed
from .kinematics import flexion_trace, propagate_best
from .search import SearchConfig, SeedBounds, ToleranceLadder, run_search
from .search.trace import TraceSettings


class NetPayload(BaseModel):
    angles: dict[str, list[float]]
    unit: str = "deg"


class QsRequest(BaseModel):
    alpha_deg: float
    beta_deg: float
    gamma_deg: float
    branch: str = "+"
    samples: int = Field(default=25, ge=1, le=500)


class ClassifyRequest(BaseModel):
    net: NetPayload
    tol: float = PUBLISHED_DIGITS_TOL


class FlexRequest(BaseModel):
    net: NetPayload
    theta1_deg: float
    t_min: float
    t_max: float
    steps: int = Field(default=50, ge=2, le=500)


class SearchRequest(BaseModel):
    deltas_deg: list[float]
    thetas_deg: list[float]
    seed_count: int = Field(default=2000, ge=1, le=200000)
    rng_seed: int = 0
    solver_max_iter: int = 60
    dedupe_radius: float = 1e-6
    tolerances: Optional[dict] = None
    bounds: Optional[dict] = None
    trace: Optional[dict] = None
    max_solutions: int = Field(default=200, ge=1, le=100000)


def _domain_error(exc: KokonetError) -> HTTPException:
    return HTTPException(status_code=422, detail={
        "error": type(exc).__name__,
        "message": str(exc),
    })


def create_app(frontend_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="kokonet", version="0.1.0")
    bundle_cache: dict[str, dict] = {}
    cache_lock = threading.Lock()

    @app.exception_handler(RequestValidationError)
    async def schema_error(_req: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "SchemaViolation",
                                                      "detail": exc.errors()})

    def cache_bundle(bundle: FlexionBundle) -> tuple[str, dict]:
        payload = bundle.to_json_dict()
        digest = hashlib.sha256(
            json.dumps(payload, sort_keys=True).encode()
        ).hexdigest()[:16]
        with cache_lock:
            bundle_cache[digest] = payload
        return digest, payload

    def parse_net(payload: NetPayload):
        from .cli import net_from_dict

        try:
            return net_from_dict(payload.model_dump())
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=422, detail={
                "error": "InvalidNet", "message": str(exc)}) from exc

    @app.post("/qs")
    def qs_endpoint(req: QsRequest) -> dict:
        from .cli import check_bundle

        try:
            seed = qsnet.QsSeed.from_degrees(req.alpha_deg, req.beta_deg, req.gamma_deg)
            net = qsnet.build_qs_net(seed)
            fl = qsnet.qs_flexion(net, +1 if req.branch == "+" else -1)
            lengths = auto_edge_lengths(net)
            bundle = FlexionBundle(net=net, lengths=lengths, branch=req.branch,
                                   provenance="closed-form")
            for t in qsnet.sample_parameters(fl, req.samples):
                state = qsnet.eval_flexion(fl, t)
                bundle.samples.append(
                    BundleSample(t=t, state=state, embedded=embed(net, state, lengths)))
        except KokonetError as exc:
            raise _domain_error(exc) from exc
        except ValueError as exc:
            raise HTTPException(status_code=422, detail={
                "error": "InvalidSeed", "message": str(exc)}) from exc
        digest, payload = cache_bundle(bundle)
        return {
            "bundle_id": digest,
            "bundle": payload,
            "classification": classify(net).to_json_dict(),
            "check": check_bundle(bundle),
        }

    @app.post("/classify")
    def classify_endpoint(req: ClassifyRequest) -> dict:
        net = parse_net(req.net)
        return classify(net, tol=req.tol).to_json_dict()

    @app.post("/flex")
    def flex_endpoint(req: FlexRequest) -> dict:
        from .cli import check_bundle

        net = parse_net(req.net)
        try:
            state, res, _ = propagate_best(net, math.radians(req.theta1_deg))
            if res > 1e-8:
                raise HTTPException(status_code=422, detail={
                    "error": "PropagationDead",
                    "message": f"no closing state at theta1 (residual {res:.3e})"})
            trace = flexion_trace(net, state, (req.t_min, req.t_max), req.steps)
            lengths = auto_edge_lengths(net)
            bundle = FlexionBundle(net=net, lengths=lengths, branch="+",
                                   provenance="traced")
            for t, st in trace.samples:
                bundle.samples.append(
                    BundleSample(t=t, state=st, embedded=embed(net, st, lengths)))
        except KokonetError as exc:
            raise _domain_error(exc) from exc
        digest, payload = cache_bundle(bundle)
        return {
            "bundle_id": digest,
            "bundle": payload,
            "classification": classify(net).to_json_dict(),
            "check": check_bundle(bundle),
            "truncated_at": trace.died_at,
        }

    @app.post("/search")
    def search_endpoint(req: SearchRequest) -> dict:
        try:
            kw: dict[str, Any] = dict(
                seed_count=req.seed_count, rng_seed=req.rng_seed,
                solver_max_iter=req.solver_max_iter, dedupe_radius=req.dedupe_radius,
            )
            if req.tolerances:
                kw["tolerances"] = ToleranceLadder(**req.tolerances)
            if req.bounds:
                kw["bounds"] = SeedBounds(**req.bounds)
            if req.trace:
                kw["trace"] = TraceSettings(**req.trace)
            cfg = SearchConfig.from_degrees(req.deltas_deg, req.thetas_deg, **kw)
        except (ValueError, TypeError) as exc:
            raise HTTPException(status_code=400, detail={
                "error": "SchemaViolation", "message": str(exc)}) from exc
        outcome = run_search(cfg)
        return {
            "stats": outcome.stats_dict(),
            "solutions": [s.to_json_dict() for s in outcome.solutions[:req.max_solutions]],
        }

    @app.get("/bundle/{bundle_id}")
    def bundle_endpoint(bundle_id: str) -> dict:
        with cache_lock:
            payload = bundle_cache.get(bundle_id)
        if payload is None:
            raise HTTPException(status_code=404, detail={
                "error": "NotFound", "message": f"no bundle {bundle_id!r} in cache"})
        return payload

    if frontend_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="viewer")

    return app
