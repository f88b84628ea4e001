"""Engine adapters: a uniform execute/load surface over concrete engines.

Two families ship here. ReferenceAdapter wraps the in-process reference
engine and answers in canonical-json row strings. BridgeAdapter speaks a
small line-delimited JSON protocol to an external engine bridge over stdio
or HTTP, so real engines can be attached without this package importing
their client libraries.

Bridge protocol, one JSON object per line (stdio) or per POST body (HTTP):

    request:  {"id": <str>, "action": "load"|"execute"|"reset"|"ping",
               "payload": {...}}
    response: {"id": <same>, "ok": true, "rows": [<str>, ...]}
              {"id": <same>, "ok": false,
               "error": {"class": <str>, "message": <str>}}

Responses may arrive out of order; they are matched by id. A response that
does not arrive within the deadline is a Timeout, which the campaign records
and moves past. A reply that cannot be parsed against this shape is reported
as an EngineError of class "protocol-error".
"""

from __future__ import annotations

import itertools
import json
import shlex
import subprocess
import threading
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import requests

from .canonical import encode_records
from .cypher_parser import parse_cypher_subset
from .engine import (
    EvaluationError, FaultSet, GraphStore, MutationRejected, execute_ir,
)
from .generate import emit_load_statements
from .gremlin_parser import parse_gremlin_subset
from .ir import UnsupportedSyntax
from .model import LabeledPropertyGraph

DEFAULT_EXECUTE_TIMEOUT_S = 10.0
DIALECTS = ("cypher", "gremlin")


class AdapterError(Exception):
    """Operational adapter failure (bad config, dead bridge, failed load)."""


@dataclass(frozen=True)
class Rows:
    """Successful execution: one raw string per result row."""

    rows: tuple[str, ...]


@dataclass(frozen=True)
class EngineError:
    """The engine rejected or failed the query."""

    error_class: str
    message: str


@dataclass(frozen=True)
class Timeout:
    seconds: float


RawResult = Rows | EngineError | Timeout


@dataclass(frozen=True)
class Capabilities:
    style: str  # normalization style for raw rows
    mutations: bool = False


@runtime_checkable
class EngineAdapter(Protocol):
    name: str
    dialect: str

    def capabilities(self) -> Capabilities: ...

    def load(self, graph: LabeledPropertyGraph) -> None: ...

    def execute(self, query: str, timeout_s: float = DEFAULT_EXECUTE_TIMEOUT_S
                ) -> RawResult: ...

    def reset(self) -> None: ...

    def ping(self) -> bool: ...

    def close(self) -> None: ...


def _parse(query: str, dialect: str):
    if dialect == "gremlin":
        return parse_gremlin_subset(query)
    return parse_cypher_subset(query)


class ReferenceAdapter:
    """In-process reference engine behind the adapter surface."""

    def __init__(self, dialect: str, name: str = "reference",
                 faults: FaultSet | None = None, allow_mutations: bool = False):
        if dialect not in DIALECTS:
            raise AdapterError(f"unknown dialect {dialect!r}")
        self.name = name
        self.dialect = dialect
        self.faults = faults or FaultSet()
        self.allow_mutations = allow_mutations
        self.store = GraphStore()

    def capabilities(self) -> Capabilities:
        return Capabilities(style="canonical-json", mutations=self.allow_mutations)

    def load(self, graph: LabeledPropertyGraph) -> None:
        self.store.load(graph)

    def execute(self, query: str, timeout_s: float = DEFAULT_EXECUTE_TIMEOUT_S
                ) -> RawResult:
        try:
            ir = _parse(query, self.dialect)
        except UnsupportedSyntax as exc:
            return EngineError("unsupported-syntax", str(exc))
        try:
            records = execute_ir(self.store, ir, self.faults, self.allow_mutations)
        except MutationRejected as exc:
            return EngineError("mutation-rejected", str(exc))
        except EvaluationError as exc:
            return EngineError("semantic-error", str(exc))
        return Rows(tuple(json.dumps(row, sort_keys=True)
                          for row in encode_records(records)))

    def reset(self) -> None:
        self.store.clear()

    def ping(self) -> bool:
        return True

    def close(self) -> None:
        pass


class _StdioTransport:
    """Line-delimited JSON over a child process's stdin/stdout."""

    def __init__(self, cmd: list[str]):
        try:
            self.proc = subprocess.Popen(
                cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise AdapterError(f"cannot start bridge {cmd!r}: {exc}") from exc
        self._replies: dict[str, dict] = {}
        self._lock = threading.Condition()
        self._closed = False
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def _read_loop(self) -> None:
        for line in self.proc.stdout:
            line = line.strip()
            if not line:
                continue
            try:
                reply = json.loads(line)
            except ValueError:
                reply = {"id": None, "ok": False,
                         "error": {"class": "protocol-error",
                                   "message": f"unparseable reply line: {line[:200]}"}}
            with self._lock:
                key = reply.get("id") if isinstance(reply, dict) else None
                if key is not None:
                    self._replies[str(key)] = reply
                self._lock.notify_all()
        with self._lock:
            self._closed = True
            self._lock.notify_all()

    def request(self, req: dict, timeout_s: float) -> dict | None:
        """Returns the matching reply, or None on deadline expiry."""
        req_id = req["id"]
        try:
            self.proc.stdin.write(json.dumps(req) + "\n")
            self.proc.stdin.flush()
        except (OSError, ValueError) as exc:
            raise AdapterError(f"bridge stdin closed: {exc}") from exc
        with self._lock:
            got = self._lock.wait_for(
                lambda: req_id in self._replies or self._closed,
                timeout=timeout_s,
            )
            if req_id in self._replies:
                return self._replies.pop(req_id)
            if not got or not self._closed:
                return None
        raise AdapterError("bridge exited before replying")

    def close(self) -> None:
        if self.proc.poll() is None:
            try:
                self.proc.stdin.close()
            except OSError:
                pass
            try:
                self.proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()


class _HttpTransport:
    """One POST per request; the reply body is the response object."""

    def __init__(self, url: str, session: requests.Session | None = None):
        self.url = url
        self.session = session or requests.Session()

    def request(self, req: dict, timeout_s: float) -> dict | None:
        try:
            resp = self.session.post(self.url, json=req, timeout=timeout_s)
        except requests.Timeout:
            return None
        except requests.RequestException as exc:
            raise AdapterError(f"bridge unreachable at {self.url}: {exc}") from exc
        try:
            return resp.json()
        except ValueError:
            return {"id": req["id"], "ok": False,
                    "error": {"class": "protocol-error",
                              "message": f"non-JSON reply (HTTP {resp.status_code})"}}

    def close(self) -> None:
        self.session.close()


@dataclass
class BridgeAdapter:
    """External engine behind the bridge protocol."""

    name: str
    dialect: str
    style: str
    transport: object
    timeout_s: float = DEFAULT_EXECUTE_TIMEOUT_S
    _ids: itertools.count = field(default_factory=lambda: itertools.count(1))

    def __post_init__(self):
        if self.dialect not in DIALECTS:
            raise AdapterError(f"unknown dialect {self.dialect!r}")

    def capabilities(self) -> Capabilities:
        return Capabilities(style=self.style, mutations=True)

    def _roundtrip(self, action: str, payload: dict,
                   timeout_s: float) -> dict | None:
        req = {"id": f"{self.name}-{next(self._ids)}", "action": action,
               "payload": payload}
        reply = self.transport.request(req, timeout_s)
        if reply is None:
            return None
        if not isinstance(reply, dict) or not isinstance(reply.get("ok"), bool):
            return {"ok": False, "error": {"class": "protocol-error",
                                           "message": f"malformed reply: {reply!r:.200}"}}
        return reply

    @staticmethod
    def _error_of(reply: dict) -> EngineError:
        err = reply.get("error")
        if isinstance(err, dict) and isinstance(err.get("class"), str):
            return EngineError(err["class"], str(err.get("message", "")))
        return EngineError("protocol-error", f"error reply without class: {reply!r:.200}")

    def load(self, graph: LabeledPropertyGraph) -> None:
        statements = emit_load_statements(graph, self.dialect)
        reply = self._roundtrip(
            "load", {"dialect": self.dialect, "statements": statements},
            max(self.timeout_s, 60.0),
        )
        if reply is None:
            raise AdapterError(f"{self.name}: load timed out")
        if not reply["ok"]:
            err = self._error_of(reply)
            raise AdapterError(f"{self.name}: load failed: "
                               f"{err.error_class}: {err.message}")

    def execute(self, query: str, timeout_s: float | None = None) -> RawResult:
        timeout_s = self.timeout_s if timeout_s is None else timeout_s
        reply = self._roundtrip("execute", {"query": query}, timeout_s)
        if reply is None:
            return Timeout(timeout_s)
        if not reply["ok"]:
            return self._error_of(reply)
        rows = reply.get("rows")
        if not isinstance(rows, list) or not all(isinstance(r, str) for r in rows):
            return EngineError("protocol-error", "ok reply without string rows")
        return Rows(tuple(rows))

    def reset(self) -> None:
        reply = self._roundtrip("reset", {}, self.timeout_s)
        if reply is None or not reply["ok"]:
            raise AdapterError(f"{self.name}: reset failed")

    def ping(self) -> bool:
        try:
            reply = self._roundtrip("ping", {}, self.timeout_s)
        except AdapterError:
            return False
        return bool(reply and reply.get("ok"))

    def close(self) -> None:
        self.transport.close()


def make_adapter(spec: dict) -> EngineAdapter:
    """Builds an adapter from one engine entry of a campaign config."""
    kind = spec.get("kind", "reference")
    dialect = spec.get("dialect", "cypher")
    name = spec.get("name", kind)
    if kind == "reference":
        faults = FaultSet.of(*spec.get("faults", []))
        return ReferenceAdapter(
            dialect, name=name, faults=faults,
            allow_mutations=bool(spec.get("allow_mutations", False)),
        )
    if kind != "bridge":
        raise AdapterError(f"unknown adapter kind {kind!r}")
    style = spec.get("style")
    if not style:
        raise AdapterError(f"bridge adapter {name!r} needs a normalization style")
    timeout_s = float(spec.get("timeout_s", DEFAULT_EXECUTE_TIMEOUT_S))
    if "cmd" in spec:
        cmd = spec["cmd"]
        if isinstance(cmd, str):
            cmd = shlex.split(cmd)
        transport = _StdioTransport(list(cmd))
    elif "url" in spec:
        transport = _HttpTransport(spec["url"])
    else:
        raise AdapterError(f"bridge adapter {name!r} needs 'cmd' or 'url'")
    return BridgeAdapter(name=name, dialect=dialect, style=style,
                         transport=transport, timeout_s=timeout_s)
