"""Session-oriented HTTP API for interactive viewers.

Every response is a pure function of (session dataset, request
parameters); ROIs are the only mutable session state. Caches are an
invisible optimization and never change a response body.
"""
from __future__ import annotations

import io as iolib
import math
import threading
import uuid
from collections import OrderedDict
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from PIL import Image

from . import io
from .io import load_cine_loop
from .leakage import LeakageModel, build_leakage_model
from .model import (
    CineLoop,
    DegenerateReferenceError,
    LoadError,
    PipelineConfig,
    RoiSet,
    build_roi_set,
)
from .flow import extract_time_series
from .pipeline import evaluate, run_pipeline

_STACK_CACHE_SLOTS = 4
_PNG_CACHE_SLOTS = 256


class ApiError(Exception):
    def __init__(self, status_code: int, message: str):
        super().__init__(message)
        self.status_code = status_code
        self.message = message


class Session:
    """One loaded dataset plus its mutable ROI slot and result caches."""

    def __init__(self, session_id: str, loop: CineLoop):
        self.id = session_id
        self.loop = loop
        self.lock = threading.RLock()
        self.rois: RoiSet | None = None
        self._model: LeakageModel | None = None
        self._stacks: OrderedDict[tuple, np.ndarray] = OrderedDict()
        self._pngs: OrderedDict[tuple, bytes] = OrderedDict()

    def model(self) -> LeakageModel:
        with self.lock:
            if self._model is None:
                self._model = build_leakage_model(self.loop)
            return self._model

    def _config_key(self, config: PipelineConfig) -> tuple:
        c = config.to_dict()
        return tuple(sorted(c.items()))

    def enhanced_stack(self, config: PipelineConfig) -> np.ndarray:
        key = self._config_key(config)
        with self.lock:
            cached = self._stacks.get(key)
            if cached is not None:
                self._stacks.move_to_end(key)
                return cached
        stack = run_pipeline(self.loop, config, model=self.model())
        stack.setflags(write=False)
        with self.lock:
            self._stacks[key] = stack
            self._stacks.move_to_end(key)
            while len(self._stacks) > _STACK_CACHE_SLOTS:
                self._stacks.popitem(last=False)
        return stack

    def enhanced_png(self, config: PipelineConfig, k: int) -> bytes:
        key = (self._config_key(config), k)
        with self.lock:
            cached = self._pngs.get(key)
            if cached is not None:
                self._pngs.move_to_end(key)
                return cached
        stack = self.enhanced_stack(config)
        if not (0 <= k < stack.shape[0]):
            raise ApiError(422, f"output index {k} out of range [0, {stack.shape[0] - 1}]")
        frame8 = io.quantize(stack[k], 8).astype(np.uint8)
        buf = iolib.BytesIO()
        Image.fromarray(frame8, mode="L").save(buf, format="PNG")
        body = buf.getvalue()
        with self.lock:
            self._pngs[key] = body
            self._pngs.move_to_end(key)
            while len(self._pngs) > _PNG_CACHE_SLOTS:
                self._pngs.popitem(last=False)
        return body


def _parse_bool(raw: str, name: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("on", "true", "1", "yes"):
        return True
    if lowered in ("off", "false", "0", "no"):
        return False
    raise ApiError(422, f"{name}: expected on/off, got {raw!r}")


def _parse_int(raw: str, name: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ApiError(422, f"{name}: expected an integer, got {raw!r}") from None


def _parse_float(raw: str, name: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ApiError(422, f"{name}: expected a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ApiError(422, f"{name}: must be finite, got {raw!r}")
    return value


def _config_from_query(params) -> PipelineConfig:
    kwargs = {}
    if (v := params.get("method")) is not None:
        kwargs["method"] = v
    if (v := params.get("alpha")) is not None:
        kwargs["alpha"] = _parse_float(v, "alpha")
    if (v := params.get("window")) is not None:
        kwargs["window_w"] = _parse_int(v, "window")
    if (v := params.get("percentile")) is not None:
        kwargs["percentile_p"] = _parse_float(v, "percentile")
    if (v := params.get("closure")) is not None:
        kwargs["closure_radius"] = _parse_int(v, "closure")
    if (v := params.get("leakage")) is not None:
        kwargs["leakage_removal"] = _parse_bool(v, "leakage")
    if (v := params.get("average_frames")) is not None:
        kwargs["average_frames"] = _parse_int(v, "average_frames")
    try:
        return PipelineConfig(**kwargs)
    except ValueError as exc:
        raise ApiError(422, str(exc)) from None


def create_app(data_root: Path | str) -> FastAPI:
    data_root = Path(data_root).resolve()
    app = FastAPI(title="mceus service", docs_url=None, redoc_url=None)
    # single-user desk tool without auth; let viewers on other ports in
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions: dict[str, Session] = {}
    table_lock = threading.Lock()

    def get_session(session_id: str) -> Session:
        with table_lock:
            session = sessions.get(session_id)
        if session is None:
            raise ApiError(404, f"unknown session {session_id!r}")
        return session

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status_code, content={"error": exc.message})

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=422, content={"error": str(exc.errors())})

    @app.exception_handler(DegenerateReferenceError)
    async def _degenerate(_request: Request, exc: DegenerateReferenceError):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.get("/v1/health")
    async def health():
        return {"status": "ok"}

    @app.post("/v1/sessions", status_code=201)
    async def create_session(request: Request):
        try:
            body = await request.json()
        except Exception:
            raise ApiError(400, "request body must be JSON") from None
        if not isinstance(body, dict) or not isinstance(body.get("manifest"), str) or not body["manifest"]:
            raise ApiError(400, "body must be an object with a 'manifest' path string")
        rel = body["manifest"]
        if Path(rel).is_absolute():
            raise ApiError(400, "manifest path must be relative to the data root")
        candidate = (data_root / rel).resolve()
        if not candidate.is_relative_to(data_root):
            raise ApiError(400, "manifest path escapes the data root")
        if not candidate.is_file():
            raise ApiError(404, f"manifest not found: {rel}")
        try:
            loop = load_cine_loop(candidate)
        except LoadError as exc:
            raise ApiError(422, str(exc)) from None
        session = Session(uuid.uuid4().hex, loop)
        with table_lock:
            sessions[session.id] = session
        return {
            "id": session.id,
            "n_frames": loop.n_frames,
            "width": loop.width,
            "height": loop.height,
            "pre_contrast": {"start": loop.pre_contrast[0], "end": loop.pre_contrast[1]},
            "bolus_arrival_index": loop.bolus_arrival_index,
        }

    @app.get("/v1/sessions/{session_id}/enhanced/{k}")
    async def enhanced_frame(session_id: str, k: int, request: Request):
        session = get_session(session_id)
        config = _config_from_query(request.query_params)
        body = session.enhanced_png(config, k)
        return Response(content=body, media_type="image/png")

    @app.get("/v1/sessions/{session_id}/quality")
    async def quality(session_id: str):
        session = get_session(session_id)
        model = session.model()
        totals = [float(frame.sum()) for frame in session.loop.frames]
        return {"spread_ratio": model.spread_ratio, "per_frame_totals": totals}

    @app.put("/v1/sessions/{session_id}/rois", status_code=204)
    async def put_rois(session_id: str, request: Request):
        session = get_session(session_id)
        try:
            body = await request.json()
        except Exception:
            raise ApiError(400, "request body must be JSON") from None
        try:
            entries = io.parse_roi_entries(body)
            rois = build_roi_set(entries, session.loop.width, session.loop.height)
        except LoadError as exc:
            raise ApiError(422, str(exc)) from None
        with session.lock:
            session.rois = rois
        return Response(status_code=204)

    @app.get("/v1/sessions/{session_id}/rois")
    async def get_rois(session_id: str):
        session = get_session(session_id)
        with session.lock:
            rois = session.rois
        if rois is None:
            raise ApiError(404, "no rois stored for this session")
        return io.roi_set_to_obj(rois)

    @app.get("/v1/sessions/{session_id}/metrics")
    async def metrics(session_id: str, request: Request):
        session = get_session(session_id)
        params = request.query_params
        config = _config_from_query(params)
        with session.lock:
            rois = session.rois
        if rois is None:
            raise ApiError(422, "no rois stored; PUT /rois first")
        eval_index = None
        if (v := params.get("eval_index")) is not None:
            eval_index = _parse_int(v, "eval_index")
        baseline = params.get("baseline", "none")
        if baseline not in ("none", "raw"):
            raise ApiError(422, f"baseline: expected 'none' or 'raw', got {baseline!r}")
        enhanced = session.enhanced_stack(config)
        try:
            report = evaluate(
                session.loop,
                config,
                rois,
                evaluation_index=eval_index,
                baseline=baseline,
                model=session.model(),
                enhanced=enhanced,
            )
        except ValueError as exc:
            raise ApiError(422, str(exc)) from None
        return report.to_dict()

    @app.get("/v1/sessions/{session_id}/timeseries")
    async def timeseries(session_id: str, request: Request):
        session = get_session(session_id)
        params = request.query_params
        config = _config_from_query(params)
        x, y, label = params.get("x"), params.get("y"), params.get("roi_label")
        has_pixel = x is not None or y is not None
        if has_pixel == (label is not None):
            raise ApiError(422, "pass either x and y, or roi_label")
        pixel = None
        roi_mask = None
        if has_pixel:
            if x is None or y is None:
                raise ApiError(422, "both x and y are required for a pixel series")
            pixel = (_parse_int(x, "x"), _parse_int(y, "y"))
        else:
            with session.lock:
                rois = session.rois
            if rois is None:
                raise ApiError(422, "no rois stored; PUT /rois first")
            try:
                roi_mask = rois.get(label).mask
            except KeyError:
                raise ApiError(422, f"no roi labeled {label!r}") from None
        try:
            series = extract_time_series(
                session.loop,
                pixel=pixel,
                roi_mask=roi_mask,
                method=config.method,
                spec=config.window_w,
                alpha=config.alpha,
                percentile_p=config.percentile_p,
            )
        except ValueError as exc:
            raise ApiError(422, str(exc)) from None
        return [[t, v] for t, v in series]

    return app
