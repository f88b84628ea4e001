"""Query generation: a remote chat-completion backend and a replay backend.

Every remote response is appended to a JSON-lines fixture file so any campaign
can be replayed offline and deterministically. Fixture entries record the
round number, a sha256 of the prompt (guarding against replaying fixtures made
for a different graph), and the raw response text.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass, field

import requests


class GenerationError(Exception):
    """Base class for generation failures; carries the round number."""

    def __init__(self, message: str, round_no: int | None = None):
        super().__init__(message if round_no is None else f"round {round_no}: {message}")
        self.round_no = round_no


class TransportError(GenerationError):
    """The HTTP call failed or returned a malformed body. Retryable."""


class ReplayMissError(GenerationError):
    """The fixture file has no entry for the requested round."""


class ReplayMismatchError(GenerationError):
    """The fixture entry was recorded for a different prompt."""


@dataclass
class GenerationRequest:
    prompt: str
    round_no: int
    model: str = "gpt-3.5-turbo-16k-0613"
    temperature: float = 1.0
    max_output_tokens: int | None = None


@dataclass
class GenerationResponse:
    round_no: int
    text: str
    prompt_sha256: str


@dataclass
class Query:
    """One candidate query, enriched as it moves through the pipeline."""

    text: str
    dialect: str
    round_no: int
    index: int  # position within its round
    fingerprint: tuple[str, ...] | None = None  # filled by the IR layer
    lint: object | None = None  # filled by the lint layer


def prompt_sha256(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


# --- fixtures -------------------------------------------------------------------

def append_fixture(path: str, resp: GenerationResponse) -> None:
    entry = {
        "round": resp.round_no,
        "prompt_sha256": resp.prompt_sha256,
        "response": resp.text,
    }
    with open(path, "a", encoding="utf-8") as f:
        f.write(json.dumps(entry, sort_keys=True) + "\n")


def load_fixtures(path: str) -> dict[int, dict]:
    """Later entries for the same round win, so re-recording a round works."""
    entries = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                entry = json.loads(line)
                entries[int(entry["round"])] = entry
            except (ValueError, KeyError) as exc:
                raise GenerationError(f"{path}:{lineno}: bad fixture line ({exc})")
    return entries


class RemoteGenerator:
    """Calls a chat-completions endpoint and records fixtures as it goes.

    The credential is read from the environment variable named in the config;
    it is never written to disk.
    """

    def __init__(self, endpoint: str, model: str, temperature: float = 1.0,
                 credential_env: str | None = None, fixture_path: str | None = None,
                 timeout_s: float = 120.0, session: requests.Session | None = None):
        self.endpoint = endpoint
        self.model = model
        self.temperature = temperature
        self.credential_env = credential_env
        self.fixture_path = fixture_path
        self.timeout_s = timeout_s
        self.session = session or requests.Session()

    def generate_round(self, req: GenerationRequest) -> GenerationResponse:
        headers = {"Content-Type": "application/json"}
        if self.credential_env:
            token = os.environ.get(self.credential_env)
            if not token:
                raise GenerationError(
                    f"credential env var {self.credential_env} is not set", req.round_no
                )
            headers["Authorization"] = f"Bearer {token}"
        payload = {
            "model": req.model or self.model,
            "messages": [{"role": "user", "content": req.prompt}],
            "temperature": req.temperature,
        }
        if req.max_output_tokens is not None:
            payload["max_tokens"] = req.max_output_tokens
        try:
            r = self.session.post(self.endpoint, json=payload, headers=headers,
                                  timeout=self.timeout_s)
            r.raise_for_status()
            body = r.json()
            text = body["choices"][0]["message"]["content"]
        except (requests.RequestException, ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"chat endpoint failure: {exc}", req.round_no)
        resp = GenerationResponse(req.round_no, text, prompt_sha256(req.prompt))
        if self.fixture_path:
            append_fixture(self.fixture_path, resp)
        return resp


class ReplayGenerator:
    """Serves previously recorded responses; never touches the network."""

    def __init__(self, fixture_path: str):
        self.fixture_path = fixture_path
        self.entries = load_fixtures(fixture_path)

    def generate_round(self, req: GenerationRequest) -> GenerationResponse:
        entry = self.entries.get(req.round_no)
        if entry is None:
            raise ReplayMissError(
                f"no fixture entry in {self.fixture_path}", req.round_no
            )
        recorded = entry.get("prompt_sha256", "")
        actual = prompt_sha256(req.prompt)
        if recorded and recorded != actual:
            raise ReplayMismatchError(
                "fixture was recorded for a different prompt "
                f"({recorded[:12]}... != {actual[:12]}...)", req.round_no
            )
        return GenerationResponse(req.round_no, entry["response"], actual)


# --- response parsing -------------------------------------------------------------

_NUMBERED = re.compile(r"^\s*\d+[.)]\s+(.*)$")
_FENCE = re.compile(r"^\s*```")

_CYPHER_LEADING = {
    "MATCH", "OPTIONAL", "WITH", "UNWIND", "RETURN", "CREATE", "MERGE", "CALL",
    "UNION", "FOREACH", "SET", "DELETE", "DETACH", "REMOVE", "DROP", "LOAD",
}


def _looks_like_query(text: str, dialect: str) -> bool:
    if dialect == "gremlin":
        return text.startswith("g.")
    first = re.match(r"[A-Za-z]+", text)
    return bool(first) and first.group(0).upper() in _CYPHER_LEADING


def _strip_decorations(text: str) -> str:
    text = text.strip()
    while text and text[-1] == ";":
        text = text[:-1].rstrip()
    for quote in ("`", '"', "'"):
        if len(text) >= 2 and text[0] == quote and text[-1] == quote:
            text = text[1:-1].strip()
    return text


def parse_generation_response(resp: GenerationResponse, dialect: str) -> list[Query]:
    """Extract candidate queries from free-form model output.

    Accepts numbered lines, fenced code blocks, and bare lines that end with a
    semicolon (Cypher) or start with "g." (Gremlin). Prose is dropped. Every
    extracted query is a single line of text.
    """
    queries: list[Query] = []
    in_fence = False
    for raw_line in resp.text.splitlines():
        if _FENCE.match(raw_line):
            in_fence = not in_fence
            continue
        line = raw_line.strip()
        if not line:
            continue
        numbered = _NUMBERED.match(line)
        candidate = None
        if numbered:
            body = _strip_decorations(numbered.group(1))
            if _looks_like_query(body, dialect):
                candidate = body
        elif in_fence:
            if not line.startswith(("#", "//", "--")):
                body = _strip_decorations(line)
                if _looks_like_query(body, dialect):
                    candidate = body
        elif line.endswith(";") and dialect == "cypher":
            body = _strip_decorations(line)
            if _looks_like_query(body, dialect):
                candidate = body
        elif line.startswith("g.") and dialect == "gremlin":
            candidate = _strip_decorations(line)
        if candidate:
            queries.append(Query(
                text=candidate,
                dialect=dialect,
                round_no=resp.round_no,
                index=len(queries),
            ))
    return queries
