#!/usr/bin/env python3
"""Neo4j bridge: speaks the harness wire protocol over stdio.

Usage:
    python3 neo4j_bridge.py bolt://localhost:7687 [username]

The password is read from the NEO4J_PASSWORD environment variable; it never
appears in configs or on the command line. Requires the official driver
(pip install neo4j).

Engine entry:

    {"kind": "bridge", "name": "neo4j", "dialect": "cypher",
     "style": "canonical-json",
     "cmd": "python3 contrib/neo4j_bridge.py bolt://localhost:7687"}
"""

import json
import os
import sys

from neo4j import GraphDatabase
from neo4j.graph import Node, Relationship


def tag(value):
    """Driver value to the tagged canonical-json shape."""
    if value is None:
        return {"t": "null"}
    if isinstance(value, bool):
        return {"t": "bool", "v": value}
    if isinstance(value, int):
        return {"t": "int", "v": value}
    if isinstance(value, float):
        return {"t": "float", "v": value}
    if isinstance(value, str):
        return {"t": "str", "v": value}
    if isinstance(value, (list, tuple)):
        return {"t": "list", "v": [tag(v) for v in value]}
    if isinstance(value, Node):
        return {"t": "node", "label": next(iter(value.labels), ""),
                "props": {k: tag(v) for k, v in dict(value).items()}}
    if isinstance(value, Relationship):
        return {"t": "edge", "label": value.type,
                "props": {k: tag(v) for k, v in dict(value).items()}}
    raise TypeError(f"no tagged encoding for {type(value).__name__}")


def handle(session, request):
    rid = request.get("id")
    action = request.get("action")
    payload = request.get("payload") or {}
    try:
        if action == "ping":
            session.run("RETURN 1").consume()
            return {"id": rid, "ok": True}
        if action == "reset":
            session.run("MATCH (n) DETACH DELETE n").consume()
            return {"id": rid, "ok": True}
        if action == "load":
            if payload.get("dialect") != "cypher":
                return {"id": rid, "ok": False,
                        "error": {"class": "load-error",
                                  "message": "this bridge speaks cypher, got "
                                             f"{payload.get('dialect')!r}"}}
            session.run("MATCH (n) DETACH DELETE n").consume()
            for stmt in payload.get("statements", []):
                session.run(stmt).consume()
            return {"id": rid, "ok": True}
        if action == "execute":
            result = session.run(payload.get("query", ""))
            rows = [json.dumps([tag(v) for v in record.values()])
                    for record in result]
            return {"id": rid, "ok": True, "rows": rows}
        return {"id": rid, "ok": False,
                "error": {"class": "protocol-error",
                          "message": f"unknown action {action!r}"}}
    except Exception as exc:  # driver errors carry a code; keep it as the class
        cls = getattr(exc, "code", None) or type(exc).__name__
        return {"id": rid, "ok": False,
                "error": {"class": str(cls), "message": str(exc)}}


def main():
    if len(sys.argv) < 2:
        print("usage: neo4j_bridge.py <bolt-uri> [username]", file=sys.stderr)
        return 2
    uri = sys.argv[1]
    user = sys.argv[2] if len(sys.argv) > 2 else "neo4j"
    driver = GraphDatabase.driver(
        uri, auth=(user, os.environ.get("NEO4J_PASSWORD", "")))
    with driver.session() as session:
        for line in sys.stdin:
            line = line.strip()
            if not line:
                continue
            try:
                request = json.loads(line)
            except ValueError:
                request = {}
            if not isinstance(request, dict):
                request = {}
            sys.stdout.write(json.dumps(handle(session, request)) + "\n")
            sys.stdout.flush()
    driver.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
