"""Chat-completion access with deterministic record/replay.

Three provider modes:

* ``live``   - one HTTP round trip against any chat-completions-compatible
               endpoint (``{model, messages[{role,content}], temperature}``).
* ``replay`` - responses served from a :class:`ReplayStore`; no network.
* ``mock``   - responses produced by a caller-supplied function.

With ``record=True`` the gateway persists every (request, response) pair into
the store, so a later replay run needs no provider at all. Requests are keyed
by a stable fingerprint over (model_name, messages, temperature); the
``request_tag`` is logging metadata only and never enters the fingerprint.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from enum import Enum
from pathlib import Path
from typing import Callable, Literal, Optional

import httpx
from pydantic import BaseModel, ConfigDict, Field

ENV_ENDPOINT = "PERFGEN_ENDPOINT"
ENV_API_KEY = "PERFGEN_API_KEY"
ENV_MODEL = "PERFGEN_MODEL"


class GatewayError(Exception):
    pass


class MissingReplayEntry(GatewayError):
    pass


class TransportError(GatewayError):
    pass


class EmptyCompletion(GatewayError):
    pass


class Provider(str, Enum):
    LIVE = "live"
    REPLAY = "replay"
    MOCK = "mock"


class ChatMessage(BaseModel):
    model_config = ConfigDict(frozen=True)
    role: Literal["system", "user"]
    content: str


class ChatRequest(BaseModel):
    model_config = ConfigDict(frozen=True)
    model_name: str
    messages: list[ChatMessage] = Field(min_length=1)
    temperature: float = 0.0
    request_tag: str = ""


class ChatResponse(BaseModel):
    model_config = ConfigDict(frozen=True)
    content: str
    provider: Provider
    cache_hit: bool = False
    latency: float = 0.0


def fingerprint(request: ChatRequest) -> str:
    """Stable, order-sensitive content hash of a request (tag excluded)."""
    payload = json.dumps(
        {
            "model": request.model_name,
            "messages": [[m.role, m.content] for m in request.messages],
            "temperature": request.temperature,
        },
        sort_keys=True,
        ensure_ascii=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ReplayStore:
    """Directory-backed map from request fingerprint to recorded response.

    Layout: ``<root>/index.json`` plus, per entry, ``<fp>.txt`` (response
    content) and ``<fp>.request.json`` (the full request, which lets
    ``verify_integrity`` recompute fingerprints).
    """

    def __init__(self, root: Path | str):
        self.root = Path(root)
        self._lock = threading.Lock()
        self._index: dict[str, dict] = {}
        index_path = self.root / "index.json"
        if index_path.is_file():
            data = json.loads(index_path.read_text(encoding="utf-8"))
            self._index = data.get("entries", {})
            self._model_name = data.get("model_name", "")
        else:
            self._model_name = ""

    @property
    def model_name(self) -> str:
        """Model name the store was recorded with ("" when empty/mixed)."""
        return self._model_name

    def __len__(self) -> int:
        return len(self._index)

    def __contains__(self, fp: str) -> bool:
        return fp in self._index

    def fingerprints(self) -> list[str]:
        return sorted(self._index)

    def get(self, fp: str) -> Optional[str]:
        if fp not in self._index:
            return None
        return (self.root / f"{fp}.txt").read_text(encoding="utf-8")

    def put(self, request: ChatRequest, content: str) -> str:
        fp = fingerprint(request)
        with self._lock:
            self.root.mkdir(parents=True, exist_ok=True)
            (self.root / f"{fp}.txt").write_text(content, encoding="utf-8")
            (self.root / f"{fp}.request.json").write_text(
                json.dumps(request.model_dump(mode="json"), indent=2) + "\n",
                encoding="utf-8",
            )
            self._index[fp] = {"request_tag": request.request_tag}
            if not self._model_name:
                self._model_name = request.model_name
            self._write_index()
        return fp

    def _write_index(self) -> None:
        payload = {"model_name": self._model_name, "entries": dict(sorted(self._index.items()))}
        (self.root / "index.json").write_text(
            json.dumps(payload, indent=2) + "\n", encoding="utf-8"
        )

    def verify_integrity(self) -> list[str]:
        """Cross-check index, response files and request fingerprints."""
        issues: list[str] = []
        if not (self.root / "index.json").is_file():
            return [f"missing index.json under {self.root}"]
        for fp in self._index:
            resp = self.root / f"{fp}.txt"
            reqf = self.root / f"{fp}.request.json"
            if not resp.is_file():
                issues.append(f"missing response file for {fp}")
            elif not resp.read_text(encoding="utf-8"):
                issues.append(f"empty response file for {fp}")
            if not reqf.is_file():
                issues.append(f"missing request file for {fp}")
                continue
            try:
                req = ChatRequest.model_validate_json(reqf.read_text(encoding="utf-8"))
            except Exception as exc:
                issues.append(f"unreadable request file for {fp}: {exc}")
                continue
            if fingerprint(req) != fp:
                issues.append(f"fingerprint mismatch for {fp}")
        for path in self.root.glob("*.txt"):
            if path.stem not in self._index:
                issues.append(f"orphan response file {path.name}")
        return issues


class LLMGateway:
    """Thread-safe completion front end with retries, caching and recording."""

    def __init__(
        self,
        mode: Provider | str,
        model_name: str = "",
        *,
        endpoint: Optional[str] = None,
        api_key: Optional[str] = None,
        store: Optional[ReplayStore] = None,
        record: bool = False,
        mock_responder: Optional[Callable[[ChatRequest], str]] = None,
        max_attempts: int = 3,
        backoff: float = 0.5,
        http_client: Optional[httpx.Client] = None,
        timeout: float = 120.0,
    ):
        self.mode = Provider(mode)
        self.model_name = model_name or os.environ.get(ENV_MODEL, "")
        self.record = record
        self.store = store
        self.mock_responder = mock_responder
        self.max_attempts = max_attempts
        self.backoff = backoff
        self._client = http_client
        self._timeout = timeout

        if self.mode is Provider.REPLAY:
            if store is None:
                raise GatewayError("replay mode requires a replay store")
            if not self.model_name:
                self.model_name = store.model_name
        elif self.mode is Provider.MOCK:
            if mock_responder is None:
                raise GatewayError("mock mode requires a responder")
        else:
            self.endpoint = endpoint or os.environ.get(ENV_ENDPOINT, "")
            self.api_key = api_key or os.environ.get(ENV_API_KEY, "")
            if not self.endpoint:
                raise GatewayError(
                    f"live mode requires an endpoint ({ENV_ENDPOINT} or --endpoint)"
                )
        if record and store is None:
            raise GatewayError("recording requires a replay store")

    def complete(self, request: ChatRequest) -> ChatResponse:
        start = time.perf_counter()
        fp = fingerprint(request)

        if self.mode is Provider.REPLAY:
            content = self.store.get(fp)
            if content is None:
                raise MissingReplayEntry(
                    f"no replay entry for stage {request.request_tag!r} (fingerprint {fp})"
                )
            return ChatResponse(
                content=content,
                provider=Provider.REPLAY,
                cache_hit=True,
                latency=time.perf_counter() - start,
            )

        # Cache check lets interrupted recording sessions resume cheaply.
        if self.store is not None:
            cached = self.store.get(fp)
            if cached is not None:
                return ChatResponse(
                    content=cached,
                    provider=self.mode,
                    cache_hit=True,
                    latency=time.perf_counter() - start,
                )

        if self.mode is Provider.MOCK:
            content = self.mock_responder(request)
        else:
            content = self._complete_live(request)
        if not content:
            raise EmptyCompletion(f"provider returned no content for {request.request_tag!r}")

        if self.record and self.store is not None:
            self.store.put(request, content)
        return ChatResponse(
            content=content,
            provider=self.mode,
            cache_hit=False,
            latency=time.perf_counter() - start,
        )

    def _completions_url(self) -> str:
        url = self.endpoint.rstrip("/")
        if not url.endswith("/chat/completions"):
            url = url + "/chat/completions"
        return url

    def _complete_live(self, request: ChatRequest) -> str:
        payload = {
            "model": request.model_name,
            "messages": [{"role": m.role, "content": m.content} for m in request.messages],
            "temperature": request.temperature,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        client = self._client or httpx.Client(timeout=self._timeout)
        owned = self._client is None
        try:
            last_error: Optional[Exception] = None
            for attempt in range(self.max_attempts):
                try:
                    resp = client.post(self._completions_url(), json=payload, headers=headers)
                except httpx.HTTPError as exc:
                    last_error = exc
                    time.sleep(self.backoff * (2**attempt))
                    continue
                if resp.status_code >= 500:
                    last_error = TransportError(f"server error {resp.status_code}")
                    time.sleep(self.backoff * (2**attempt))
                    continue
                if resp.status_code != 200:
                    raise TransportError(f"endpoint returned {resp.status_code}: {resp.text[:200]}")
                try:
                    return resp.json()["choices"][0]["message"]["content"] or ""
                except (KeyError, IndexError, TypeError, ValueError) as exc:
                    raise EmptyCompletion(f"unusable completion payload: {exc}") from exc
            raise TransportError(f"exhausted {self.max_attempts} attempts: {last_error}")
        finally:
            if owned:
                client.close()
