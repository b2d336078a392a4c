"""Minimal chat-completions client used by the judge and caption jobs.

Targets any OpenAI-compatible endpoint. Full request/response transcripts
go to the `gapextract.api` logger for auditability; credentials come from
the environment only.
"""

from __future__ import annotations

import base64
import json
import logging
import time
from pathlib import Path

import httpx

log = logging.getLogger("gapextract.api")


class ExtractionError(Exception):
    """A job failed after exhausting its retries."""


def image_content(path: str | Path) -> dict:
    blob = base64.b64encode(Path(path).read_bytes()).decode("ascii")
    suffix = Path(path).suffix.lstrip(".").lower() or "png"
    return {"type": "image_url",
            "image_url": {"url": f"data:image/{suffix};base64,{blob}"}}


class ChatClient:
    def __init__(self, base_url: str, api_key: str | None = None,
                 model: str = "gpt-5.1", timeout: float = 120.0,
                 attempts: int = 3, backoff: float = 0.5,
                 transport: httpx.BaseTransport | None = None):
        headers = {}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self.model = model
        self.attempts = attempts
        self.backoff = backoff
        self._client = httpx.Client(base_url=base_url, headers=headers,
                                    timeout=timeout, transport=transport)

    def close(self) -> None:
        self._client.close()

    def chat_json(self, messages: list[dict]) -> dict:
        """One round trip returning the parsed JSON body of the reply.
        Transport errors, non-2xx statuses, and unparseable replies all
        retry with bounded backoff before giving up."""
        payload = {
            "model": self.model,
            "messages": messages,
            "response_format": {"type": "json_object"},
        }
        last = None
        for attempt in range(self.attempts):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                log.debug("request attempt=%d payload=%s", attempt,
                          json.dumps(payload)[:2000])
                response = self._client.post("/chat/completions", json=payload)
                log.debug("response status=%d body=%s",
                          response.status_code, response.text[:2000])
                response.raise_for_status()
                content = response.json()["choices"][0]["message"]["content"]
                return json.loads(content)
            except (httpx.HTTPError, KeyError, IndexError,
                    json.JSONDecodeError) as exc:
                last = exc
                log.warning("attempt %d failed: %s", attempt, exc)
        raise ExtractionError(f"exhausted {self.attempts} attempts: {last}")
