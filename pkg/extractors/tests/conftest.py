import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np
import pytest
from PIL import Image


def structured_image(rng, size, levels=6):
    """Blocky scene with sharp edges so corner detection has material."""
    w, h = size
    img = np.full((h, w), 40.0)
    for _ in range(levels):
        x0 = int(rng.integers(0, w - 8))
        y0 = int(rng.integers(0, h - 8))
        bw = int(rng.integers(6, max(7, w // 3)))
        bh = int(rng.integers(6, max(7, h // 3)))
        img[y0:y0 + bh, x0:x0 + bw] = float(rng.uniform(60, 230))
    img += rng.uniform(-3, 3, img.shape)
    img = np.clip(img, 0, 255)
    rgb = np.stack([img, img * 0.95, img * 0.9], axis=-1).astype(np.uint8)
    return Image.fromarray(rgb, "RGB")


@pytest.fixture()
def live_fixture(tmp_path):
    """Two attractions: gt images plus per-attraction frame directories
    standing in for decoded videos, and a job manifest."""
    rng = np.random.default_rng(7)
    videos = tmp_path / "videos"
    entries = []
    for rid in ("granite-gate", "ivory-dome"):
        gt = structured_image(rng, (96, 72))
        gt_path = tmp_path / f"{rid}.png"
        gt.save(gt_path)
        frame_dir = videos / rid
        frame_dir.mkdir(parents=True)
        base = gt.resize((72, 96))
        for t in range(9):
            arr = np.asarray(base, dtype=np.float64)
            arr = np.clip(arr + rng.uniform(-6, 6, arr.shape), 0, 255)
            Image.fromarray(arr.astype(np.uint8), "RGB").save(
                frame_dir / f"t{t:03d}.png")
        entries.append({
            "id": rid, "name": rid.replace("-", " ").title(),
            "city": "Testville", "country": "Examplia",
            "continent": "Europe", "north_south": "GlobalNorth",
            "west_east": "GlobalWest", "pageviews": 1000 + len(entries),
            "category": "monument", "gt_image": gt_path.name,
            "short_caption": "s", "detailed_caption": "d",
        })
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({
        "config": {"n_frames": 5, "tau": 3000.0, "beta": 1.5},
        "attractions": entries,
    }, indent=2))
    return manifest, videos


@pytest.fixture()
def json_server():
    """Local chat-completions endpoint; the test supplies a function from
    request payload to reply content (a JSON-serializable object or a raw
    string), or a list of them consumed per request."""
    servers = []

    def start(reply):
        replies = reply if isinstance(reply, list) else None
        calls = {"n": 0}

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                length = int(self.headers["Content-Length"])
                request = json.loads(self.rfile.read(length))
                fn = (replies[min(calls["n"], len(replies) - 1)]
                      if replies is not None else reply)
                calls["n"] += 1
                content = fn(request)
                if not isinstance(content, str):
                    content = json.dumps(content)
                body = json.dumps({
                    "choices": [{"message": {"content": content}}]
                }).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

        server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        servers.append(server)
        return f"http://127.0.0.1:{server.server_port}", calls

    yield start
    for server in servers:
        server.shutdown()
        server.server_close()
