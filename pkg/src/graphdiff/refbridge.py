"""Reference bridge: serves the in-process engine over the bridge protocol.

Run as ``python -m graphdiff.refbridge --dialect cypher`` to get a
stdio bridge any BridgeAdapter can drive. It exists for two reasons: it lets
the bridge transport be tested end to end without a real external engine,
and it is the worked example for anyone writing a bridge to a real one.

Protocol recap (one JSON object per line, both directions):

    {"id": "x1", "action": "ping", "payload": {}}
    {"id": "x1", "ok": true}

Actions: load (payload: {"dialect", "statements"}), execute (payload:
{"query"}), reset, ping. Errors come back as
{"id", "ok": false, "error": {"class", "message"}}.
"""

from __future__ import annotations

import argparse
import json
import sys

from .adapters import EngineError, ReferenceAdapter, Rows, _parse
from .engine import EvaluationError, FaultSet, execute_ir
from .ir import UnsupportedSyntax


def _error(reply_id, error_class: str, message: str) -> dict:
    return {"id": reply_id, "ok": False,
            "error": {"class": error_class, "message": message}}


def _handle_load(adapter: ReferenceAdapter, payload: dict) -> dict | None:
    dialect = payload.get("dialect")
    if dialect != adapter.dialect:
        return {"class": "load-error",
                "message": f"bridge speaks {adapter.dialect}, got {dialect!r}"}
    statements = payload.get("statements")
    if not isinstance(statements, list):
        return {"class": "protocol-error", "message": "load needs statements"}
    adapter.store.clear()
    for stmt in statements:
        try:
            ir = _parse(stmt, adapter.dialect)
            execute_ir(adapter.store, ir, adapter.faults, allow_mutations=True)
        except (UnsupportedSyntax, EvaluationError) as exc:
            adapter.store.clear()
            return {"class": "load-error", "message": f"{stmt!r}: {exc}"}
    return None


def handle_request(adapter: ReferenceAdapter, request: dict) -> dict:
    reply_id = request.get("id")
    action = request.get("action")
    payload = request.get("payload") or {}
    if action == "ping":
        return {"id": reply_id, "ok": True}
    if action == "reset":
        adapter.reset()
        return {"id": reply_id, "ok": True}
    if action == "load":
        err = _handle_load(adapter, payload)
        if err is not None:
            return {"id": reply_id, "ok": False, "error": err}
        return {"id": reply_id, "ok": True}
    if action == "execute":
        query = payload.get("query")
        if not isinstance(query, str):
            return _error(reply_id, "protocol-error", "execute needs a query string")
        result = adapter.execute(query)
        if isinstance(result, Rows):
            return {"id": reply_id, "ok": True, "rows": list(result.rows)}
        assert isinstance(result, EngineError)
        return _error(reply_id, result.error_class, result.message)
    return _error(reply_id, "protocol-error", f"unknown action {action!r}")


def serve(adapter: ReferenceAdapter, stdin=None, stdout=None) -> None:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except ValueError:
            request = {}
        if not isinstance(request, dict):
            request = {}
        reply = handle_request(adapter, request)
        stdout.write(json.dumps(reply, sort_keys=True) + "\n")
        stdout.flush()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="graphdiff-refbridge",
        description="serve the reference engine over the stdio bridge protocol",
    )
    parser.add_argument("--dialect", choices=("cypher", "gremlin"), required=True)
    parser.add_argument("--faults", default="",
                        help="comma-separated fault ids to enable, e.g. F1,F5")
    parser.add_argument("--allow-mutations", action="store_true",
                        help="let execute run mutating queries (load always may)")
    args = parser.parse_args(argv)
    fault_ids = [f for f in args.faults.split(",") if f]
    adapter = ReferenceAdapter(
        args.dialect, name="refbridge", faults=FaultSet.of(*fault_ids),
        allow_mutations=args.allow_mutations,
    )
    serve(adapter)
    return 0


if __name__ == "__main__":
    sys.exit(main())
