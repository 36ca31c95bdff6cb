"""HTTP+JSON face of the session store (plain WSGI, stdlib server).

Endpoints:
    GET  /session/<id>/next   next trial descriptor, or done marker
    POST /session/<id>/vote   submit a TrialRecord body
    GET  /export              zip archive with DSIS CSV + PWC JSONL
    GET  /assets/<stimulus>   packed little-endian cloud for the viewer

The packed asset format is uint32 point count, then count xyz float32
triples, then count rgb uint8 triples.
"""

from __future__ import annotations

import io
import json
import struct
import zipfile
from pathlib import Path

import numpy as np

from .cloud import PointCloud
from .errors import PcqlabError, StateError, ValidationError, SchemaError
from .ply import load_ply
from .session import SessionStore, TrialRecord


def pack_cloud(cloud: PointCloud) -> bytes:
    """Serialize a cloud into the viewer's packed binary format."""
    n = len(cloud)
    colors = cloud.colors
    if colors is None:
        colors = np.full((n, 3), 255, dtype=np.uint8)
    return (struct.pack("<I", n)
            + cloud.positions.astype("<f4").tobytes()
            + np.ascontiguousarray(colors, dtype=np.uint8).tobytes())


def unpack_cloud(blob: bytes) -> tuple[np.ndarray, np.ndarray]:
    (n,) = struct.unpack_from("<I", blob, 0)
    expected = 4 + n * 12 + n * 3
    if len(blob) < expected:
        raise SchemaError(f"packed cloud truncated: {len(blob)} < {expected} bytes")
    positions = np.frombuffer(blob, dtype="<f4", count=n * 3, offset=4).reshape(n, 3)
    colors = np.frombuffer(blob, dtype=np.uint8, count=n * 3, offset=4 + n * 12).reshape(n, 3)
    return positions, colors


class ExperimentService:
    """WSGI application over one session store."""

    def __init__(self, store: SessionStore, asset_dir: str | Path | None = None):
        self.store = store
        self.asset_dir = Path(asset_dir) if asset_dir else None
        self._asset_cache: dict[str, bytes] = {}

    # -- wsgi --------------------------------------------------------------

    def __call__(self, environ, start_response):
        try:
            method = environ["REQUEST_METHOD"]
            path = environ.get("PATH_INFO", "/")
            status, ctype, body = self._route(method, path, environ)
        except (SchemaError,) as exc:
            status, ctype, body = "404 Not Found", "application/json", _err(exc)
        except (ValidationError, StateError) as exc:
            status, ctype, body = "400 Bad Request", "application/json", _err(exc)
        except PcqlabError as exc:
            status, ctype, body = "500 Internal Server Error", "application/json", _err(exc)
        start_response(status, [("Content-Type", ctype),
                                ("Content-Length", str(len(body)))])
        return [body]

    def _route(self, method: str, path: str, environ) -> tuple[str, str, bytes]:
        parts = [p for p in path.split("/") if p]
        if method == "GET" and len(parts) == 3 and parts[0] == "session" and parts[2] == "next":
            return self._next(parts[1])
        if method == "POST" and len(parts) == 3 and parts[0] == "session" and parts[2] == "vote":
            return self._vote(parts[1], environ)
        if method == "GET" and parts == ["export"]:
            return self._export()
        if method == "GET" and len(parts) == 2 and parts[0] == "assets":
            return self._asset(parts[1])
        raise SchemaError(f"no route for {method} {path}")

    def _next(self, session_id: str) -> tuple[str, str, bytes]:
        trial = self.store.next_trial(session_id)
        if trial is None:
            body = json.dumps({"done": True}).encode()
            return "200 OK", "application/json", body
        plan = self.store.plan(session_id)
        def describe(stimulus_id):
            meta = plan.stimuli.get(stimulus_id)
            return {
                "id": stimulus_id,
                "asset": f"/assets/{stimulus_id}",
                "point_size": meta.point_size if meta else 1.0,
                "bit_depth": meta.bit_depth if meta else 10,
            }
        body = json.dumps({
            "done": False,
            "session": session_id,
            "trial_index": trial.index,
            "protocol": trial.protocol,
            "content": trial.content,
            "left": describe(trial.left),
            "right": describe(trial.right),
            "reference_side": trial.reference_side,
            "time_budget_ms": trial.time_budget_ms,
        }).encode()
        return "200 OK", "application/json", body

    def _vote(self, session_id: str, environ) -> tuple[str, str, bytes]:
        try:
            size = int(environ.get("CONTENT_LENGTH") or 0)
        except ValueError:
            size = 0
        raw = environ["wsgi.input"].read(size) if size else b"{}"
        try:
            data = json.loads(raw.decode() or "{}")
        except json.JSONDecodeError as exc:
            raise ValidationError(f"vote body is not valid JSON: {exc}")
        missing = {"trial_index", "response"} - set(data)
        if missing:
            raise ValidationError(f"vote body lacks fields {sorted(missing)}")
        record = TrialRecord(
            session_id=session_id,
            trial_index=int(data["trial_index"]),
            response=data["response"],
            elapsed_ms=float(data.get("elapsed_ms", 0.0)),
            timestamp=float(data.get("timestamp", 0.0)),
        )
        ack = self.store.submit_vote(record)
        body = json.dumps({
            "accepted": ack.accepted,
            "duplicate": ack.duplicate,
            "flagged_short_exposure": ack.flagged_short_exposure,
        }).encode()
        return "200 OK", "application/json", body

    def _export(self) -> tuple[str, str, bytes]:
        dsis_csv, pwc_jsonl = self.store.export()
        buffer = io.BytesIO()
        with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as archive:
            archive.writestr("dsis_scores.csv", dsis_csv)
            archive.writestr("pwc_votes.jsonl", pwc_jsonl)
        return "200 OK", "application/zip", buffer.getvalue()

    def _asset(self, stimulus_id: str) -> tuple[str, str, bytes]:
        if "/" in stimulus_id or ".." in stimulus_id:
            raise ValidationError("bad asset id")
        blob = self._asset_cache.get(stimulus_id)
        if blob is None:
            if self.asset_dir is None:
                raise SchemaError("no asset directory configured")
            packed = self.asset_dir / f"{stimulus_id}.bin"
            ply = self.asset_dir / f"{stimulus_id}.ply"
            if packed.exists():
                blob = packed.read_bytes()
            elif ply.exists():
                blob = pack_cloud(load_ply(ply))
            else:
                raise SchemaError(f"no asset for stimulus {stimulus_id!r}")
            self._asset_cache[stimulus_id] = blob
        return "200 OK", "application/octet-stream", blob


def _err(exc: Exception) -> bytes:
    return json.dumps({"error": str(exc)}).encode()


def serve(store: SessionStore, asset_dir=None, host: str = "127.0.0.1",
          port: int = 8750):  # pragma: no cover - manual entry point
    from wsgiref.simple_server import make_server

    app = ExperimentService(store, asset_dir)
    with make_server(host, port, app) as httpd:
        print(f"serving experiment sessions on http://{host}:{port}/")
        httpd.serve_forever()
