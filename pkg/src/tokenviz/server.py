"""Read-only HTTP API over a session bundle, plus static UI hosting.

Every endpoint is a pure function of the bundle, so identical GETs return
identical bytes. The raster is encoded once on first request and cached.
Built on the stdlib http.server; requests may be handled concurrently and
share nothing but immutable state.
"""

from __future__ import annotations

import mimetypes
import os
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, unquote, urlsplit

from .bundle import SessionBundle
from .errors import DataError
from .render import passage_for_token, render_pixels, layout_json
from .topics import top_words
from . import jsonio

_FALLBACK_INDEX = """<!doctype html>
<meta charset="utf-8">
<title>tokenviz</title>
<h1>tokenviz API</h1>
<p>No UI bundle is configured. Endpoints:</p>
<ul>
<li><code>/api/meta</code></li>
<li><code>/api/layout</code></li>
<li><code>/api/pixels</code></li>
<li><code>/api/token/{i}</code></li>
<li><code>/api/passage?token=i&amp;window=w</code></li>
<li><code>/api/topics</code></li>
<li><code>/api/docs</code></li>
</ul>
"""


class _ServerState:
    def __init__(self, bundle: SessionBundle, static_dir: str | None):
        self.bundle = bundle
        self.static_dir = os.path.realpath(static_dir) if static_dir else None
        self.global_index = {pos: g for g, pos in enumerate(bundle.positions)}
        self._pixels: bytes | None = None
        self._lock = threading.Lock()

    def pixels_png(self) -> bytes:
        with self._lock:
            if self._pixels is None:
                self._pixels = render_pixels(self.bundle.layout, self.bundle.colors)
            return self._pixels

    def meta(self) -> dict:
        bundle = self.bundle
        common = {
            "modelType": bundle.kind,
            "documents": len(bundle.corpus.documents),
            "tokens": bundle.layout.token_count,
        }
        if bundle.kind == "lda":
            model = bundle.model
            common.update(
                k=model.k,
                palette=[bundle.palette.color_for(k).hex for k in range(model.k)],
                blend=bundle.style.blend,
            )
        else:
            model = bundle.model
            common.update(
                classA=model.class_a,
                classB=model.class_b,
                negative=bundle.scale.negative_color.hex,
                positive=bundle.scale.positive_color.hex,
                scaleMagnitude=bundle.scale.scale_magnitude,
                priorLogit=model.prior_logit,
            )
        return common

    def topics(self) -> dict:
        bundle = self.bundle
        if bundle.kind != "lda":
            raise DataError("topic data needs a topic model")
        model = bundle.model
        return {
            "topics": [
                {
                    "topic": k,
                    "color": bundle.palette.color_for(k).hex,
                    "words": [[term, p] for term, p in top_words(model.phi_mean, model.terms, k, 10)],
                }
                for k in range(model.k)
            ]
        }

    def docs(self) -> dict:
        return {
            "docs": [
                {"id": doc.id, "date": doc.order_key}
                for doc in self.bundle.corpus.documents
            ]
        }

    def passage(self, t: int, window: int) -> dict:
        bundle = self.bundle
        doc_id, (start, end), fragment = passage_for_token(
            bundle.corpus, bundle.positions, bundle.doc_colors, t, window
        )
        di, ti = bundle.positions[t]
        token_map = []
        for in_doc in range(start, end):
            g = self.global_index.get((di, in_doc))
            if g is not None:
                token_map.append({"t": in_doc, "global": g})
        return {
            "doc": doc_id,
            "focus": t,
            "focusPos": ti,
            "window": window,
            "start": start,
            "end": end,
            "html": fragment,
            "tokens": token_map,
        }


class _Handler(BaseHTTPRequestHandler):
    state: _ServerState

    # Quiet the default per-request stderr logging.
    def log_message(self, format: str, *args) -> None:
        pass

    def _send(self, code: int, content_type: str, body: bytes) -> None:
        self.send_response(code)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Cache-Control", "no-store")
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, code: int, obj) -> None:
        self._send(code, "application/json; charset=utf-8", jsonio.dumps(obj).encode("utf-8"))

    def _not_found(self, message: str = "not found") -> None:
        self._send_json(404, {"error": message})

    def do_GET(self) -> None:  # noqa: N802 (http.server naming)
        try:
            self._route()
        except DataError as exc:
            self._send_json(400, {"error": str(exc)})
        except (BrokenPipeError, ConnectionResetError):
            pass
        except Exception as exc:
            try:
                self._send_json(500, {"error": f"internal error: {exc}"})
            except OSError:
                pass

    def _route(self) -> None:
        url = urlsplit(self.path)
        path = unquote(url.path)
        if path.startswith("/api/"):
            self._route_api(path, parse_qs(url.query))
        else:
            self._route_static(path)

    def _route_api(self, path: str, query: dict) -> None:
        state = self.state
        if path == "/api/meta":
            self._send_json(200, state.meta())
        elif path == "/api/layout":
            self._send_json(200, layout_json(state.bundle.layout))
        elif path == "/api/pixels":
            self._send(200, "image/png", state.pixels_png())
        elif path == "/api/docs":
            self._send_json(200, state.docs())
        elif path == "/api/topics":
            try:
                self._send_json(200, state.topics())
            except DataError as exc:
                self._not_found(str(exc))
        elif path.startswith("/api/token/"):
            try:
                t = int(path[len("/api/token/") :])
            except ValueError:
                self._send_json(400, {"error": "token index must be an integer"})
                return
            if 0 <= t < state.bundle.layout.token_count:
                self._send_json(200, state.bundle.token_info(t))
            else:
                self._not_found(f"no token {t}")
        elif path == "/api/passage":
            self._route_passage(query)
        else:
            self._not_found()

    def _route_passage(self, query: dict) -> None:
        try:
            t = int(query["token"][0])
            window = int(query.get("window", ["0"])[0])
        except (KeyError, ValueError):
            self._send_json(400, {"error": "passage needs integer 'token' (and optional 'window')"})
            return
        if not 0 <= t < self.state.bundle.layout.token_count:
            self._not_found(f"no token {t}")
            return
        if window < 0:
            self._send_json(400, {"error": "window must be >= 0"})
            return
        self._send_json(200, self.state.passage(t, window))

    def _route_static(self, path: str) -> None:
        if self.state.static_dir is None:
            if path in ("/", "/index.html"):
                self._send(200, "text/html; charset=utf-8", _FALLBACK_INDEX.encode("utf-8"))
            else:
                self._not_found()
            return
        rel = path.lstrip("/") or "index.html"
        full = os.path.realpath(os.path.join(self.state.static_dir, rel))
        if full != self.state.static_dir and not full.startswith(self.state.static_dir + os.sep):
            self._not_found()
            return
        if not os.path.isfile(full):
            self._not_found()
            return
        ctype = mimetypes.guess_type(full)[0] or "application/octet-stream"
        if ctype.startswith("text/") or ctype in ("application/javascript", "application/json"):
            ctype += "; charset=utf-8"
        with open(full, "rb") as fh:
            self._send(200, ctype, fh.read())


def make_server(
    bundle: SessionBundle,
    host: str = "127.0.0.1",
    port: int = 0,
    static_dir: str | None = None,
) -> ThreadingHTTPServer:
    """Bind a server without starting it; port 0 picks a free port."""
    state = _ServerState(bundle, static_dir)
    handler = type("Handler", (_Handler,), {"state": state})
    return ThreadingHTTPServer((host, port), handler)


def serve(
    bundle: SessionBundle,
    port: int = 8399,
    host: str = "127.0.0.1",
    static_dir: str | None = None,
) -> None:
    """Serve the bundle until interrupted; prints the bound address."""
    server = make_server(bundle, host=host, port=port, static_dir=static_dir)
    print(f"serving on http://{host}:{server.server_port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
