"""HTTP facade over the pipeline: scan sessions, projector images, masks,
effects, and frame previews.

Sessions are append-only: masks and effects are added, never mutated, and
the projector image is immutable after creation.  Frames render on demand
and deterministically, so equal requests return byte-identical PNGs.
Errors are JSON `{"error": ..., "diagnostics": [...]?}`.
"""

from __future__ import annotations

import base64
import binascii
import io
import json
import threading
import time
import uuid
import zipfile
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from . import shaderlang, simulator, slcodec
from .effects import EffectSpec, render_effect
from .images import decode_png, encode_png
from .masks import Mask, magic_wand, magnetic_lasso, path_to_mask, quick_select
from .projimage import ProjectorImage, fill_holes, reconstruct

MIN_VALID_FRACTION = 0.01


class ApiError(Exception):
    def __init__(self, status: int, message: str, diagnostics: list | None = None):
        self.status = status
        self.message = message
        self.diagnostics = diagnostics
        super().__init__(message)


@dataclass
class Session:
    id: str
    created_at: float
    corr: slcodec.CorrespondenceMap
    image: ProjectorImage
    valid_fraction: float
    masks: dict[str, Mask] = field(default_factory=dict)
    effects: dict[str, EffectSpec] = field(default_factory=dict)
    mask_counter: int = 0
    effect_counter: int = 0


class SessionStore:
    """In-memory sessions with optional directory persistence."""

    def __init__(self, data_dir: str | Path | None = None):
        self.sessions: dict[str, Session] = {}
        self.lock = threading.RLock()
        self.data_dir = Path(data_dir) if data_dir else None

    def add(self, session: Session) -> None:
        with self.lock:
            self.sessions[session.id] = session

    def get(self, session_id: str) -> Session:
        with self.lock:
            session = self.sessions.get(session_id)
        if session is None:
            raise ApiError(404, f"unknown session {session_id!r}")
        return session

    # ---- persistence ----

    def save_all(self) -> None:
        if self.data_dir is None:
            return
        self.data_dir.mkdir(parents=True, exist_ok=True)
        with self.lock:
            sessions = list(self.sessions.values())
        for s in sessions:
            sdir = self.data_dir / s.id
            sdir.mkdir(parents=True, exist_ok=True)
            s.corr.save(sdir / "corr.lfcm")
            np.savez_compressed(
                sdir / "projimage.npz",
                color=s.image.color,
                coverage=s.image.coverage,
                filled=s.image.filled,
            )
            for mid, mask in s.masks.items():
                mask.save(sdir / f"mask_{mid}.png")
            meta = {
                "id": s.id,
                "created_at": s.created_at,
                "valid_fraction": s.valid_fraction,
                "mask_ids": list(s.masks),
                "mask_counter": s.mask_counter,
                "effect_counter": s.effect_counter,
                "effects": {eid: spec.to_json() for eid, spec in s.effects.items()},
            }
            (sdir / "meta.json").write_text(json.dumps(meta, indent=2))

    def load_all(self) -> None:
        if self.data_dir is None or not self.data_dir.exists():
            return
        for sdir in sorted(self.data_dir.iterdir()):
            meta_path = sdir / "meta.json"
            if not meta_path.is_file():
                continue
            meta = json.loads(meta_path.read_text())
            corr = slcodec.CorrespondenceMap.load(sdir / "corr.lfcm")
            arrays = np.load(sdir / "projimage.npz")
            image = ProjectorImage(
                width=corr.projector_width,
                height=corr.projector_height,
                color=arrays["color"],
                coverage=arrays["coverage"],
                filled=arrays["filled"],
            )
            session = Session(
                id=meta["id"],
                created_at=meta["created_at"],
                corr=corr,
                image=image,
                valid_fraction=meta["valid_fraction"],
                mask_counter=meta.get("mask_counter", 0),
                effect_counter=meta.get("effect_counter", 0),
            )
            for mid in meta.get("mask_ids", []):
                session.masks[mid] = Mask.load(sdir / f"mask_{mid}.png")
            for eid, spec_json in meta.get("effects", {}).items():
                session.effects[eid] = EffectSpec.from_json(spec_json)
            self.add(session)


def _require(body: dict, key: str, kind, what: str):
    if key not in body:
        raise ApiError(400, f"missing field {key!r}")
    value = body[key]
    if kind is not None and not isinstance(value, kind):
        raise ApiError(400, f"{key!r} must be {what}")
    return value


def _point(value, what: str) -> tuple[int, int]:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, (int, float)) for v in value)
    ):
        raise ApiError(400, f"{what} must be [x, y]")
    return int(value[0]), int(value[1])


def _build_session_from_simulate(scene_json: dict) -> Session:
    try:
        scene = simulator.scene_from_json(scene_json)
    except (KeyError, ValueError, TypeError) as e:
        raise ApiError(400, f"bad scene: {e}") from None
    patterns = slcodec.generate_patterns(
        scene.rig.projector.width, scene.rig.projector.height
    )
    captures = simulator.simulate_captures(scene, patterns)
    corr = slcodec.decode(captures, patterns.manifest)
    camera_color = simulator.render_color(scene, view="camera")
    return _assemble_session(corr, camera_color)


def _build_session_from_captures(spec: dict) -> Session:
    archive_b64 = _require(spec, "archive_b64", str, "a base64 string")
    proj_size = _require(spec, "proj_size", (list, tuple), "[width, height]")
    if len(proj_size) != 2:
        raise ApiError(400, "proj_size must be [width, height]")
    pw, ph = int(proj_size[0]), int(proj_size[1])
    try:
        blob = base64.b64decode(archive_b64, validate=True)
        archive = zipfile.ZipFile(io.BytesIO(blob))
    except (binascii.Error, zipfile.BadZipFile) as e:
        raise ApiError(400, f"bad captures archive: {e}") from None
    names = sorted(n for n in archive.namelist() if n.endswith(".png"))
    manifest = slcodec.PatternManifest.for_size(pw, ph)
    if len(names) != manifest.frame_count:
        raise ApiError(
            400,
            f"expected {manifest.frame_count} capture frames for a "
            f"{pw}x{ph} projector, got {len(names)}",
        )
    frames = []
    for name in names:
        rgb = decode_png(archive.read(name))
        lum = np.floor(
            0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2] + 0.5
        ).astype(np.uint8)
        frames.append(lum)
    h, w = frames[0].shape
    captures = slcodec.CaptureSet(camera_width=w, camera_height=h, frames=tuple(frames))
    try:
        captures.validate()
    except ValueError as e:
        raise ApiError(400, str(e)) from None
    corr = slcodec.decode(captures, manifest)
    white = captures.frames[0]
    camera_color = np.repeat(white[..., None], 3, axis=2)
    return _assemble_session(corr, camera_color)


def _assemble_session(corr: slcodec.CorrespondenceMap, camera_color: np.ndarray) -> Session:
    valid_fraction = float(corr.valid.mean())
    if valid_fraction < MIN_VALID_FRACTION:
        raise ApiError(
            422,
            f"decode produced only {valid_fraction:.2%} valid pixels; "
            "the scan looks unusable",
        )
    image = reconstruct(corr, camera_color, (corr.projector_width, corr.projector_height))
    image = fill_holes(image)
    return Session(
        id=uuid.uuid4().hex[:12],
        created_at=time.time(),
        corr=corr,
        image=image,
        valid_fraction=valid_fraction,
    )


def _session_summary(session: Session) -> dict:
    return {
        "id": session.id,
        "created_at": session.created_at,
        "valid_fraction": session.valid_fraction,
        "camera_size": [session.corr.camera_width, session.corr.camera_height],
        "projector_size": [session.corr.projector_width, session.corr.projector_height],
        "masks": list(session.masks),
        "effects": list(session.effects),
    }


def _create_mask(session: Session, body: dict) -> Mask:
    tool = _require(body, "tool", str, "a string")
    image = session.image.color
    h, w = image.shape[:2]
    try:
        if tool == "magic_wand":
            seed = _point(_require(body, "seed", None, None), "seed")
            tolerance = float(body.get("tolerance", 32.0))
            connectivity = int(body.get("connectivity", 4))
            return magic_wand(image, seed, tolerance, connectivity)
        if tool == "quick_select":
            scribble = _require(body, "scribble", list, "a list of [x, y]")
            points = [_point(p, "scribble point") for p in scribble]
            tolerance = float(body.get("tolerance", 32.0))
            return quick_select(image, points, tolerance)
        if tool == "lasso":
            anchors = _require(body, "anchors", list, "a list of [x, y]")
            points = [_point(p, "anchor") for p in anchors]
            path = magnetic_lasso(image, points)
            return path_to_mask(path, (w, h))
    except ValueError as e:
        raise ApiError(422, str(e)) from None
    raise ApiError(400, f"unknown tool {tool!r} (magic_wand, quick_select, lasso)")


def create_app(data_dir: str | Path | None = None, static_dir: str | Path | None = None) -> FastAPI:
    store = SessionStore(data_dir)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        store.load_all()
        yield
        store.save_all()

    app = FastAPI(title="procam authoring service", lifespan=lifespan)
    app.state.store = store

    @app.exception_handler(ApiError)
    async def _api_error(_request, exc: ApiError):
        body = {"error": exc.message}
        if exc.diagnostics is not None:
            body["diagnostics"] = exc.diagnostics
        return JSONResponse(status_code=exc.status, content=body)

    async def _json_body(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise ApiError(400, "request body must be JSON") from None
        if not isinstance(body, dict):
            raise ApiError(400, "request body must be a JSON object")
        return body

    @app.post("/api/sessions", status_code=201)
    async def create_session(request: Request):
        body = await _json_body(request)
        has_sim = "simulate" in body
        has_cap = "captures" in body
        if has_sim == has_cap:
            raise ApiError(400, "provide exactly one of 'simulate' or 'captures'")
        if has_sim:
            if not isinstance(body["simulate"], dict):
                raise ApiError(400, "'simulate' must be a scene object")
            session = _build_session_from_simulate(body["simulate"])
        else:
            if not isinstance(body["captures"], dict):
                raise ApiError(400, "'captures' must be an object")
            session = _build_session_from_captures(body["captures"])
        store.add(session)
        summary = _session_summary(session)
        return JSONResponse(status_code=201, content=summary)

    @app.get("/api/sessions/{session_id}")
    async def get_session(session_id: str):
        return _session_summary(store.get(session_id))

    @app.get("/api/sessions/{session_id}/projector-image")
    async def get_projector_image(session_id: str):
        session = store.get(session_id)
        return Response(content=encode_png(session.image.color), media_type="image/png")

    @app.post("/api/sessions/{session_id}/masks", status_code=201)
    async def create_mask(session_id: str, request: Request):
        session = store.get(session_id)
        body = await _json_body(request)
        mask = _create_mask(session, body)
        with store.lock:
            session.mask_counter += 1
            mask_id = f"m{session.mask_counter}"
            session.masks[mask_id] = mask
        return JSONResponse(
            status_code=201, content={"id": mask_id, "member_count": int(mask.member.sum())}
        )

    @app.get("/api/sessions/{session_id}/masks/{mask_id}")
    async def get_mask(session_id: str, mask_id: str):
        session = store.get(session_id)
        mask = session.masks.get(mask_id)
        if mask is None:
            raise ApiError(404, f"unknown mask {mask_id!r}")
        png = encode_png(np.where(mask.member, 255, 0).astype(np.uint8))
        return Response(content=png, media_type="image/png")

    @app.post("/api/sessions/{session_id}/effects", status_code=201)
    async def create_effect(session_id: str, request: Request):
        session = store.get(session_id)
        body = await _json_body(request)
        try:
            spec = EffectSpec.from_json(body)
        except ValueError as e:
            raise ApiError(422, str(e)) from None
        if spec.mask is not None and spec.mask not in session.masks:
            raise ApiError(404, f"unknown mask {spec.mask!r}")
        if spec.kind == "shader":
            try:
                shaderlang.compile_shader(spec.shader_source)
            except shaderlang.ShaderCompileError as e:
                raise ApiError(
                    422,
                    "shader failed to compile",
                    diagnostics=[d.to_json() for d in e.diagnostics],
                ) from None
        with store.lock:
            session.effect_counter += 1
            effect_id = f"e{session.effect_counter}"
            session.effects[effect_id] = spec
        return JSONResponse(status_code=201, content={"id": effect_id})

    @app.get("/api/sessions/{session_id}/effects")
    async def list_effects(session_id: str):
        session = store.get(session_id)
        return [{"id": eid, "spec": spec.to_json()} for eid, spec in session.effects.items()]

    @app.get("/api/sessions/{session_id}/effects/{effect_id}/frame")
    async def get_frame(session_id: str, effect_id: str, t: float = 0.0):
        session = store.get(session_id)
        spec = session.effects.get(effect_id)
        if spec is None:
            raise ApiError(404, f"unknown effect {effect_id!r}")
        if t < 0:
            raise ApiError(400, "t must be nonnegative")
        mask = session.masks.get(spec.mask) if spec.mask else None
        try:
            frame = render_effect(spec, session.image, t, mask=mask)
        except shaderlang.ShaderRuntimeError as e:
            raise ApiError(
                422, "shader aborted at runtime", diagnostics=[e.diagnostic.to_json()]
            ) from None
        return Response(content=encode_png(frame), media_type="image/png")

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
