"""HTTP inference service over a trained infilling checkpoint."""

from __future__ import annotations

import os
import secrets
import threading
import time
from dataclasses import dataclass, field

import torch
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .alphabet import ALPHABET
from .corpus.spans import TargetSpan
from .corpus.windows import WINDOW_LEN
from .errors import ClsmError, InvalidInput, NumericalError
from .model import CLSM, ModelConfig, load_checkpoint, restore_into
from .sampler import (
    assemble_window,
    greedy_decode_target,
    interpolate_contextual,
    perturb_latent,
    sample_from_prior,
)

DEFAULT_TTL_SECONDS = 3600.0
MAX_LATENTS_PER_SESSION = 64


@dataclass
class SessionState:
    session_id: str
    window: list[str]
    span: TargetSpan
    seed: int
    latents: dict[str, torch.Tensor] = field(default_factory=dict)
    last_access: float = field(default_factory=time.monotonic)

    @property
    def left(self) -> list[str]:
        return self.window[: self.span.start]

    @property
    def right(self) -> list[str]:
        return self.window[self.span.stop :]


class LookupError404(Exception):
    """Unknown session or latent handle."""


class SessionStore:
    """Synchronized session map with idle expiry."""

    def __init__(self, ttl: float = DEFAULT_TTL_SECONDS):
        self.ttl = ttl
        self._lock = threading.Lock()
        self._sessions: dict[str, SessionState] = {}

    def _purge(self, now: float) -> None:
        dead = [k for k, s in self._sessions.items() if now - s.last_access > self.ttl]
        for k in dead:
            del self._sessions[k]

    def create(self, window: list[str], span: TargetSpan, seed: int) -> SessionState:
        state = SessionState(secrets.token_hex(8), window, span, seed)
        with self._lock:
            self._purge(time.monotonic())
            self._sessions[state.session_id] = state
        return state

    def get(self, session_id: str) -> SessionState:
        now = time.monotonic()
        with self._lock:
            self._purge(now)
            state = self._sessions.get(session_id)
            if state is None:
                raise LookupError404(f"unknown session {session_id!r}")
            state.last_access = now
            return state

    def put_latent(self, state: SessionState, z: torch.Tensor) -> str:
        handle = secrets.token_hex(8)
        with self._lock:
            state.latents[handle] = z
            while len(state.latents) > MAX_LATENTS_PER_SESSION:
                state.latents.pop(next(iter(state.latents)))
        return handle

    def get_latent(self, state: SessionState, handle: str) -> torch.Tensor:
        with self._lock:
            z = state.latents.get(handle)
        if z is None:
            raise LookupError404(f"unknown latent handle {handle!r}")
        return z


class SpanBody(BaseModel):
    start: int
    length: int


class SessionBody(BaseModel):
    window: list[str] = Field(min_length=WINDOW_LEN, max_length=WINDOW_LEN)
    span: SpanBody
    seed: int = 0


class GenerateBody(BaseModel):
    session_id: str
    seed: int


class InterpolateBody(BaseModel):
    session_id: str
    z1: str
    z2: str
    J: int = Field(ge=1, le=64)


class VaryBody(BaseModel):
    session_id: str
    z: str
    delta: float = Field(ge=0.0)
    seed: int


def load_service_model(checkpoint_path) -> CLSM:
    payload = load_checkpoint(checkpoint_path, expect_kind="clsm")
    model = CLSM(ModelConfig.from_dict(payload["config"]["model"]))
    restore_into(model, payload, checkpoint_path)
    model.eval()
    return model


def create_app(model: CLSM, ttl: float = DEFAULT_TTL_SECONDS) -> FastAPI:
    app = FastAPI(title="melody infilling service")
    # localhost-bound tool consumed by a browser UI on another origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = SessionStore(ttl)
    app.state.store = store

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc.errors()[:3])})

    @app.exception_handler(LookupError404)
    async def missing_handler(request: Request, exc: LookupError404):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(NumericalError)
    async def numeric_handler(request: Request, exc: NumericalError):
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    @app.exception_handler(ClsmError)
    async def domain_handler(request: Request, exc: ClsmError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "model_version": __version__, "d_z": model.cfg.d_z}

    @app.post("/session")
    def make_session(body: SessionBody):
        span = TargetSpan(start=body.span.start, length=body.span.length)
        span.check_canonical()
        for tok in body.window:
            if not ALPHABET.is_data_token(tok):
                raise InvalidInput(f"window token {tok!r} not in data vocabulary")
        state = store.create(list(body.window), span, body.seed)
        return {"session_id": state.session_id, "span": {"start": span.start, "length": span.length}}

    @app.post("/generate")
    def generate(body: GenerateBody):
        state = store.get(body.session_id)
        g = torch.Generator().manual_seed(body.seed)
        z = sample_from_prior(model, state.left, state.right, state.span, g)
        target = greedy_decode_target(model, z, state.left, state.right, state.span)
        handle = store.put_latent(state, z)
        return {
            "z_handle": handle,
            "target": target,
            "tokens": assemble_window(state.left, target, state.right),
        }

    @app.post("/interpolate")
    def interpolate(body: InterpolateBody):
        state = store.get(body.session_id)
        z1 = store.get_latent(state, body.z1)
        z2 = store.get_latent(state, body.z2)
        seqs = interpolate_contextual(model, z1, z2, body.J, state.left, state.right, state.span)
        return {"sequences": seqs, "J": body.J}

    @app.post("/vary")
    def vary(body: VaryBody):
        state = store.get(body.session_id)
        z = store.get_latent(state, body.z)
        g = torch.Generator().manual_seed(body.seed)
        z_new = perturb_latent(model, z, body.delta, state.left, state.right, state.span, g)
        target = greedy_decode_target(model, z_new, state.left, state.right, state.span)
        handle = store.put_latent(state, z_new)
        return {
            "z_handle": handle,
            "target": target,
            "tokens": assemble_window(state.left, target, state.right),
        }

    return app


def serve(checkpoint_path, port: int | None = None, host: str = "127.0.0.1", ttl: float = DEFAULT_TTL_SECONDS):
    """Blocking entry point; port falls back to $CLSM_PORT then 8321."""
    import uvicorn

    model = load_service_model(checkpoint_path)
    app = create_app(model, ttl)
    if port is None:
        port = int(os.environ.get("CLSM_PORT", "8321"))
    uvicorn.run(app, host=host, port=port, log_level="warning")
