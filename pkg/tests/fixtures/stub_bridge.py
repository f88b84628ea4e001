"""Misbehaving bridge process for adapter tests.

Reads bridge-protocol requests from stdin and mangles the replies according
to the mode given as argv[1]. A well-behaved reply for every action is
{"id": ..., "ok": true} plus "rows" for execute.
"""

import json
import sys


def reply(doc):
    sys.stdout.write(json.dumps(doc) + "\n")
    sys.stdout.flush()


def good(req):
    doc = {"id": req["id"], "ok": True}
    if req["action"] == "execute":
        doc["rows"] = ['[{"t": "int", "v": 1}]']
    return doc


def main():
    mode = sys.argv[1]
    for line in sys.stdin:
        if not line.strip():
            continue
        req = json.loads(line)
        if mode == "ok":
            reply(good(req))
        elif mode == "wrong-id-first":
            reply({"id": "bogus", "ok": True, "rows": ["[]"]})
            reply(good(req))
        elif mode == "garbage-then-ok":
            sys.stdout.write("not json at all\n")
            sys.stdout.flush()
            reply(good(req))
        elif mode == "silent":
            continue
        elif mode == "exit":
            return
        elif mode == "bad-rows":
            reply({"id": req["id"], "ok": True, "rows": "nope"})
        elif mode == "no-class":
            reply({"id": req["id"], "ok": False, "error": {"message": "?"}})
        else:
            raise SystemExit(f"unknown mode {mode}")


if __name__ == "__main__":
    main()
