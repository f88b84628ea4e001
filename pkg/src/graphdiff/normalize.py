"""Turns raw engine output rows into canonical records.

Each adapter declares a style; the style names the textual convention its
raw rows follow. One raw row string is one record. A top-level bracketed or
parenthesized sequence is the record's column tuple; sequences nested below
that are list values. The one exception is the "gremlin" style, where a
top-level bracketed sequence is a result stream: every element becomes its
own single-column record, matching how traversal results arrive.

Styles:
  canonical-json  tagged JSON rows as produced by the reference engine
  neo4j-ish       Python-literal rows with Node(...)/Relationship(...) values
  agens-ish       tuple rows with 'label[id]{json}' element strings and
                  {'id', 'tid', 'properties'} element maps
  gremlin         console-style streams with v[id]/e[id] references,
                  valueMap maps, and '@type'/'@value' numeric wrappers

The gremlin style may need a second round trip: v[id]/e[id] references carry
no properties, so the normalizer issues one batched valueMap() follow-up per
element kind through the executor callback and substitutes the returned maps
positionally. Any failure along the way raises NormalizationError; callers
must report that as an incomparable outcome, never as a discrepancy.
"""

from __future__ import annotations

import json
import re

from .canonical import (
    NULL, CanonicalValue, RecordSet, cv_bool, cv_edge, cv_float, cv_int,
    cv_list, cv_node, cv_str, decode_value,
)

STYLES = ("canonical-json", "neo4j-ish", "agens-ish", "gremlin")


class NormalizationError(Exception):
    """Raw output does not follow the adapter's declared style."""


class _ElementRef:
    """Placeholder for a property-less v[id]/e[id] reference."""

    __slots__ = ("kind", "id")

    def __init__(self, kind: str, ref_id: str):
        self.kind = kind
        self.id = ref_id


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> NormalizationError:
        return NormalizationError(f"{message} at offset {self.pos} in {self.text!r:.120}")

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, ch: str) -> bool:
        self.skip_ws()
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expect(self, ch: str) -> None:
        if not self.eat(ch):
            raise self.error(f"expected {ch!r}")

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def name(self) -> str:
        self.skip_ws()
        m = re.match(r"[A-Za-z_@][\w@.]*", self.text[self.pos:])
        if not m:
            raise self.error("expected a name")
        self.pos += m.end()
        return m.group()

    def quoted(self) -> str:
        self.skip_ws()
        quote = self.peek()
        if quote not in ("'", '"'):
            raise self.error("expected a quoted string")
        self.pos += 1
        out = []
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "\\" and self.pos + 1 < len(self.text):
                nxt = self.text[self.pos + 1]
                out.append({"n": "\n", "t": "\t", "r": "\r"}.get(nxt, nxt))
                self.pos += 2
                continue
            if ch == quote:
                self.pos += 1
                return "".join(out)
            out.append(ch)
            self.pos += 1
        raise self.error("unterminated string")

    def number(self) -> CanonicalValue:
        self.skip_ws()
        m = re.match(r"-?\d+(\.\d+)?([eE][+-]?\d+)?", self.text[self.pos:])
        if not m:
            raise self.error("expected a number")
        self.pos += m.end()
        token = m.group()
        if m.group(1) or m.group(2):
            return cv_float(float(token))
        return cv_int(int(token))


def _from_json_scalar(v) -> CanonicalValue:
    if v is None:
        return NULL
    if isinstance(v, bool):
        return cv_bool(v)
    if isinstance(v, int):
        return cv_int(v)
    if isinstance(v, float):
        return cv_float(v)
    if isinstance(v, str):
        return cv_str(v)
    if isinstance(v, list):
        return cv_list(_from_json_scalar(x) for x in v)
    raise NormalizationError(f"unexpected JSON value {v!r}")


# --- canonical-json ----------------------------------------------------------------

def _canonical_json_record(row: str) -> tuple:
    try:
        doc = json.loads(row)
    except ValueError as exc:
        raise NormalizationError(f"bad canonical-json row {row!r:.120}: {exc}")
    if not isinstance(doc, list):
        raise NormalizationError(f"canonical-json row is not a list: {row!r:.120}")
    try:
        return tuple(decode_value(v) for v in doc)
    except ValueError as exc:
        raise NormalizationError(str(exc))


# --- neo4j-ish ---------------------------------------------------------------------

_NEO_IDENTS = {"True": cv_bool(True), "False": cv_bool(False), "None": NULL}


def _neo_value(cur: _Cursor) -> CanonicalValue:
    cur.skip_ws()
    ch = cur.peek()
    if ch == "[":
        return cv_list(_neo_sequence(cur, "[", "]"))
    if ch in ("'", '"'):
        return cv_str(cur.quoted())
    if ch == "-" or ch.isdigit():
        return cur.number()
    ident = cur.name()
    if ident in _NEO_IDENTS:
        return _NEO_IDENTS[ident]
    if ident in ("Node", "Relationship"):
        return _neo_element(cur, ident)
    raise cur.error(f"unexpected token {ident!r}")


def _neo_element(cur: _Cursor, kind: str) -> CanonicalValue:
    cur.expect("(")
    label = None
    props: dict[str, CanonicalValue] = {}
    first = True
    while not cur.eat(")"):
        if not first:
            cur.expect(",")
        first = False
        cur.skip_ws()
        if cur.peek() in ("'", '"'):
            if label is not None:
                raise cur.error("element has two labels")
            label = cur.quoted()
            continue
        key = cur.name()
        cur.expect("=")
        props[key] = _neo_value(cur)
    maker = cv_node if kind == "Node" else cv_edge
    return maker(label, props)


def _neo_sequence(cur: _Cursor, open_ch: str, close_ch: str) -> list[CanonicalValue]:
    cur.expect(open_ch)
    items = []
    while not cur.eat(close_ch):
        if items:
            cur.expect(",")
        items.append(_neo_value(cur))
    return items


def _neo_record(row: str) -> tuple:
    cur = _Cursor(row)
    cur.skip_ws()
    if cur.peek() == "[":
        columns = _neo_sequence(cur, "[", "]")
    else:
        columns = [_neo_value(cur)]
    if not cur.at_end():
        raise cur.error("trailing data after record")
    return tuple(columns)


# --- agens-ish ---------------------------------------------------------------------

_VERTEX_RE = re.compile(
    r"^([A-Za-z_]\w*)\[[^\]]*\](\[[^\]]*\])?(\{.*\})$", re.DOTALL
)
_AGENS_IDENTS = {
    "None": NULL, "True": cv_bool(True), "False": cv_bool(False),
    "true": cv_bool(True), "false": cv_bool(False),
    "t": cv_bool(True), "f": cv_bool(False), "null": NULL,
}


def _agens_string(text: str) -> CanonicalValue:
    m = _VERTEX_RE.match(text)
    if not m:
        return cv_str(text)
    label, edge_part, props_json = m.group(1), m.group(2), m.group(3)
    try:
        doc = json.loads(props_json)
    except ValueError as exc:
        raise NormalizationError(f"bad element string {text!r:.120}: {exc}")
    if not isinstance(doc, dict):
        raise NormalizationError(f"element properties are not a map: {text!r:.120}")
    props = {k: _from_json_scalar(v) for k, v in doc.items()}
    maker = cv_edge if edge_part else cv_node
    return maker(label, props)


def _agens_value(cur: _Cursor) -> CanonicalValue:
    cur.skip_ws()
    ch = cur.peek()
    if ch == "(":
        return cv_list(_agens_sequence(cur, "(", ")"))
    if ch == "[":
        return cv_list(_agens_sequence(cur, "[", "]"))
    if ch == "{":
        return _agens_map(cur)
    if ch in ("'", '"'):
        return _agens_string(cur.quoted())
    if ch == "-" or ch.isdigit():
        return cur.number()
    ident = cur.name()
    if ident in _AGENS_IDENTS:
        return _AGENS_IDENTS[ident]
    raise cur.error(f"unexpected token {ident!r}")


def _agens_sequence(cur: _Cursor, open_ch: str, close_ch: str) -> list[CanonicalValue]:
    cur.expect(open_ch)
    items = []
    while not cur.eat(close_ch):
        if items:
            cur.expect(",")
            if cur.eat(close_ch):
                break  # tolerate the 1-tuple trailing comma
        items.append(_agens_value(cur))
    return items


def _agens_map(cur: _Cursor) -> CanonicalValue:
    cur.expect("{")
    entries: dict[str, CanonicalValue] = {}
    while not cur.eat("}"):
        if entries:
            cur.expect(",")
        cur.skip_ws()
        key = cur.quoted() if cur.peek() in ("'", '"') else cur.name()
        cur.expect(":")
        entries[key] = _agens_value(cur)
    if "id" in entries and "properties" in entries:
        props_value = entries["properties"]
        if props_value.kind == "null":
            return cv_node(None, {})  # property-stripped element stub
        if props_value.kind in ("node", "edge"):
            return cv_node(None, props_value.props())
        raise NormalizationError(f"element map with non-map properties: {entries!r}")
    return cv_node(None, entries)


def _agens_record(row: str) -> tuple:
    cur = _Cursor(row)
    cur.skip_ws()
    if cur.peek() in ("(", "["):
        open_ch = cur.peek()
        close_ch = ")" if open_ch == "(" else "]"
        columns = _agens_sequence(cur, open_ch, close_ch)
    else:
        columns = [_agens_value(cur)]
    if not cur.at_end():
        raise cur.error("trailing data after record")
    return tuple(columns)


# --- gremlin -----------------------------------------------------------------------

_GREMLIN_WORDS = {
    "true": cv_bool(True), "false": cv_bool(False),
    "True": cv_bool(True), "False": cv_bool(False),
    "null": NULL, "None": NULL,
}
_REF_RE = re.compile(r"([ve])\[([^\]]*)\]")


def _gremlin_value(cur: _Cursor):
    cur.skip_ws()
    ch = cur.peek()
    if ch == "[":
        return _gremlin_sequence(cur, "[", "]")
    if ch == "{":
        return _gremlin_map(cur)
    if ch in ("'", '"'):
        return cv_str(cur.quoted())
    m = _REF_RE.match(cur.text, cur.pos)
    if m:
        cur.pos = m.end()
        return _ElementRef("node" if m.group(1) == "v" else "edge", m.group(2).strip())
    if ch == "-" or ch.isdigit():
        return cur.number()
    token = _gremlin_bare_token(cur)
    if token in _GREMLIN_WORDS:
        return _GREMLIN_WORDS[token]
    return cv_str(token)


def _gremlin_bare_token(cur: _Cursor) -> str:
    cur.skip_ws()
    start = cur.pos
    while cur.pos < len(cur.text) and cur.text[cur.pos] not in ",]}":
        cur.pos += 1
    token = cur.text[start:cur.pos].strip()
    if not token:
        raise cur.error("expected a value")
    return token


def _gremlin_sequence(cur: _Cursor, open_ch: str, close_ch: str) -> list:
    cur.expect(open_ch)
    items = []
    while not cur.eat(close_ch):
        if items:
            cur.expect(",")
        items.append(_gremlin_value(cur))
    return items


def _gremlin_map(cur: _Cursor) -> CanonicalValue:
    cur.expect("{")
    entries: dict = {}
    while not cur.eat("}"):
        if entries:
            cur.expect(",")
        cur.skip_ws()
        key = cur.quoted() if cur.peek() in ("'", '"') else cur.name()
        if not cur.eat(":") and not cur.eat("="):
            raise cur.error("expected ':' in map entry")
        entries[key] = _gremlin_value(cur)
    if set(entries) == {"@type", "@value"}:
        value = entries["@value"]
        if isinstance(value, CanonicalValue) and value.is_numeric():
            return value
        raise NormalizationError(f"non-numeric @value wrapper: {entries!r}")
    unwrapped = {}
    for key, value in entries.items():
        if isinstance(value, list) and len(value) == 1:
            value = value[0]
        unwrapped[key] = value
    return _GremlinMap(unwrapped)


class _GremlinMap:
    """Map whose values may still hold unresolved element references."""

    __slots__ = ("entries",)

    def __init__(self, entries: dict):
        self.entries = entries


def _collect_refs(value, out: list[_ElementRef]) -> None:
    if isinstance(value, _ElementRef):
        out.append(value)
    elif isinstance(value, list):
        for item in value:
            _collect_refs(item, out)
    elif isinstance(value, _GremlinMap):
        for item in value.entries.values():
            _collect_refs(item, out)


def _substitute(value, table: dict):
    if isinstance(value, _ElementRef):
        return table[(value.kind, value.id)]
    if isinstance(value, list):
        return cv_list(_substitute(item, table) for item in value)
    if isinstance(value, _GremlinMap):
        resolved = {}
        for key, item in value.entries.items():
            item = _substitute(item, table)
            if item.kind == "list" and len(item.items()) == 1:
                item = item.items()[0]
            resolved[key] = item
        return cv_node(None, resolved)
    return value


def _resolve_refs(records: list[tuple], executor) -> list[tuple]:
    refs: list[_ElementRef] = []
    for record in records:
        for value in record:
            _collect_refs(value, refs)
    table: dict[tuple[str, str], CanonicalValue] = {}
    for kind, source in (("node", "V"), ("edge", "E")):
        ids = []
        for ref in refs:
            if ref.kind == kind and ref.id not in ids:
                ids.append(ref.id)
        if not ids:
            continue
        if executor is None:
            raise NormalizationError(
                f"result holds {kind} references but no executor is available"
            )
        followup = f"g.{source}({','.join(ids)}).valueMap()"
        maps = _followup_records(executor, followup)
        if len(maps) != len(ids):
            raise NormalizationError(
                f"{followup!r} returned {len(maps)} rows for {len(ids)} ids"
            )
        for ref_id, value in zip(ids, maps):
            table[(kind, ref_id)] = value
    return [tuple(_substitute(v, table) for v in record) for record in records]


def _followup_records(executor, query: str) -> list[CanonicalValue]:
    from .adapters import Rows  # local import to avoid a module cycle

    result = executor(query)
    if not isinstance(result, Rows):
        raise NormalizationError(f"follow-up {query!r} failed: {result!r}")
    out = []
    for record in _gremlin_records(list(result.rows), executor=None):
        if len(record) != 1:
            raise NormalizationError("follow-up rows must have one column")
        out.append(record[0])
    return out


def _gremlin_records(rows: list[str], executor) -> list[tuple]:
    records: list[tuple] = []
    for row in rows:
        cur = _Cursor(row)
        cur.skip_ws()
        if cur.peek() == "[":
            for value in _gremlin_sequence(cur, "[", "]"):
                records.append((value,))
        else:
            records.append((_gremlin_value(cur),))
        if not cur.at_end():
            raise cur.error("trailing data after record")
    return _resolve_refs(records, executor)


# --- entry point -------------------------------------------------------------------

def normalize_result(rows, style: str, executor=None) -> RecordSet:
    """rows: the raw row strings of a successful execution."""
    rows = list(rows)
    if style == "canonical-json":
        return RecordSet([_canonical_json_record(r) for r in rows])
    if style == "neo4j-ish":
        return RecordSet([_neo_record(r) for r in rows])
    if style == "agens-ish":
        return RecordSet([_agens_record(r) for r in rows])
    if style == "gremlin":
        return RecordSet(_gremlin_records(rows, executor))
    raise NormalizationError(f"unknown normalization style {style!r}")
