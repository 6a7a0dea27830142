"""HTTP JSON API over one trained model.

Endpoints: GET /health, GET /model, POST /solve, POST /score.  The
process serves a single immutable model loaded at startup; solving is
stateless, with a small response cache keyed by the request body.
Validation errors return 400, cap violations 422, missing model 503.
"""
from __future__ import annotations

import json
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import __version__
from .backend import BACKEND
from .bits import from_string
from .dataset import DatasetError
from .ett import MAX_GROUP_SIZE
from .nbc import MODEL_FORMAT, MODEL_VERSION, Model, ModelError
from .oracle import NAIVE_ATTR_CAP, rank_of, ranked
from .runner import ALGORITHMS, build_query, run_solver

_CACHE_LIMIT = 128


@dataclass
class Session:
    """Per-process state: the loaded model and a solve-response cache."""

    model: Model | None = None
    model_path: str | None = None
    last_query: dict | None = None
    cache: OrderedDict = field(default_factory=OrderedDict)

    def cached(self, key: str) -> dict | None:
        if key in self.cache:
            self.cache.move_to_end(key)
            return self.cache[key]
        return None

    def remember(self, key: str, response: dict) -> None:
        self.cache[key] = response
        self.cache.move_to_end(key)
        while len(self.cache) > _CACHE_LIMIT:
            self.cache.popitem(last=False)


def _num(payload: dict, key: str, default=None, cls=float):
    value = payload.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise HTTPException(400, f"{key} must be a number")
    return cls(value)


def create_app(model: Model | None = None, model_path: str | None = None,
               static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="tagmax", version=__version__)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"])

    if model is None and model_path:
        model = Model.from_json(Path(model_path).read_text(encoding="utf-8"))
    session = Session(model=model, model_path=model_path)
    app.state.session = session

    @app.exception_handler(RequestValidationError)
    def bad_body(_, exc):  # malformed JSON or non-object body
        return JSONResponse(status_code=400, content={"detail": str(exc.errors()[:1])})

    def need_model() -> Model:
        if session.model is None:
            raise HTTPException(503, "no model loaded")
        return session.model

    def query_from(payload: dict, default_k: int = 1):
        tags = payload.get("tags")
        if not isinstance(tags, list) or not tags:
            raise HTTPException(400, "tags must be a non-empty list")
        k = payload.get("k", default_k)
        if not isinstance(k, int) or isinstance(k, bool):
            raise HTTPException(400, "k must be an integer")
        try:
            return build_query(need_model(), tags, k)
        except (ModelError, DatasetError) as exc:
            raise HTTPException(400, str(exc))

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "backend": BACKEND,
                "model_loaded": session.model is not None}

    @app.get("/model")
    def describe_model() -> dict:
        mdl = need_model()
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "n": mdl.n,
            "m": mdl.m,
            "r": mdl.r,
            "attributes": list(mdl.attribute_names),
            "tags": list(mdl.tag_names),
            "prevalence": {tm.name: tm.prevalence for tm in mdl.tag_models},
            "smoothing": {"m_weight": mdl.smoothing.m_weight,
                          "prior_mode": mdl.smoothing.prior_mode},
            "naive_attr_cap": NAIVE_ATTR_CAP,
            "backend": BACKEND,
        }

    @app.post("/solve")
    def solve(payload: dict = Body(...)) -> dict:
        mdl = need_model()
        key = json.dumps(payload, sort_keys=True)
        hit = session.cached(key)
        if hit is not None:
            return hit
        algo = payload.get("algo", "ett")
        if algo not in ALGORITHMS:
            raise HTTPException(400, f"algo must be one of {ALGORITHMS}")
        if algo == "naive" and mdl.m > NAIVE_ATTR_CAP:
            raise HTTPException(
                422, f"naive is capped at {NAIVE_ATTR_CAP} attributes, model has {mdl.m}")
        mprime = _num(payload, "mprime", cls=int)
        if mprime is not None and not 1 <= mprime <= MAX_GROUP_SIZE:
            raise HTTPException(
                422, f"mprime must be within 1..{MAX_GROUP_SIZE}")
        query = query_from(payload)
        try:
            result = run_solver(
                mdl, query, algo,
                mprime=mprime,
                epsilon=_num(payload, "epsilon"),
                sigma=_num(payload, "sigma"),
                zprime=_num(payload, "zprime", 2, cls=int),
                restarts=_num(payload, "restarts", 16, cls=int),
                max_steps=_num(payload, "max_steps", cls=int),
                seed=_num(payload, "seed", 0, cls=int),
                trace=bool(payload.get("trace", False)))
        except (ModelError, DatasetError) as exc:
            raise HTTPException(400, str(exc))
        session.last_query = payload
        response = {"algo": algo, "k": query.k, **result.to_dict()}
        session.remember(key, response)
        return response

    @app.post("/score")
    def score(payload: dict = Body(...)) -> dict:
        mdl = need_model()
        query = query_from(payload)
        raw = payload.get("bits")
        if not isinstance(raw, str):
            raise HTTPException(400, "bits must be a string of 0s and 1s")
        try:
            bits = from_string(raw, mdl.m)
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        entry = ranked(mdl, query, bits)
        response = {
            "bits": entry.bitstring,
            "score": entry.score,
            "per_tag": [
                {
                    "name": mdl.tag_names[sel.tag],
                    "weight": sel.weight,
                    "polarity": sel.polarity,
                    "tag_score": entry.tag_scores[i],
                    "contribution": entry.per_tag[i],
                }
                for i, sel in enumerate(query.selections)
            ],
        }
        if mdl.m <= NAIVE_ATTR_CAP:
            response["rank"] = rank_of(mdl, query, bits)
            response["total"] = 1 << mdl.m
        return response

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")
    return app
