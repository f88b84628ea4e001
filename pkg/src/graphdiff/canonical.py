"""Canonical result values: the meaning-level representation every engine's
output is reduced to before comparison.

A canonical value is Null, Bool, Int, Float, Str, a graph element (node or
edge: optional label plus a sorted property map), or a list. Engine-internal
identifiers never survive canonicalization; element identity for comparison
purposes is the property map itself (the generated "name" property makes that
unambiguous).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .model import PropertyValue

KINDS = ("null", "bool", "int", "float", "str", "node", "edge", "list")


@dataclass(frozen=True)
class CanonicalValue:
    kind: str
    value: Any = None  # scalar payload, props tuple for elements, item tuple for lists
    label: str | None = None  # elements only; ignored by the comparator

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown canonical kind {self.kind!r}")

    def is_numeric(self) -> bool:
        return self.kind in ("int", "float")

    def is_element(self) -> bool:
        return self.kind in ("node", "edge")

    def props(self) -> dict[str, "CanonicalValue"]:
        assert self.is_element()
        return dict(self.value)

    def items(self) -> tuple["CanonicalValue", ...]:
        assert self.kind == "list"
        return self.value

    def __repr__(self):  # compact form for assertion messages
        if self.kind == "null":
            return "Null"
        if self.kind in ("bool", "int", "float", "str"):
            return f"{self.kind.capitalize()}({self.value!r})"
        if self.kind == "list":
            return f"List{list(self.value)!r}"
        head = self.kind.capitalize()
        body = ", ".join(f"{k}: {v!r}" for k, v in self.value)
        label = f":{self.label}" if self.label else ""
        return f"{head}{label}{{{body}}}"


NULL = CanonicalValue("null")


def cv_bool(v: bool) -> CanonicalValue:
    return CanonicalValue("bool", bool(v))


def cv_int(v: int) -> CanonicalValue:
    return CanonicalValue("int", int(v))


def cv_float(v: float) -> CanonicalValue:
    return CanonicalValue("float", float(v))


def cv_str(v: str) -> CanonicalValue:
    return CanonicalValue("str", str(v))


def cv_list(items) -> CanonicalValue:
    return CanonicalValue("list", tuple(items))


def _prop_tuple(props: dict[str, CanonicalValue]) -> tuple:
    return tuple(sorted(props.items()))


def cv_node(label: str | None, props: dict[str, CanonicalValue]) -> CanonicalValue:
    return CanonicalValue("node", _prop_tuple(props), label)


def cv_edge(label: str | None, props: dict[str, CanonicalValue]) -> CanonicalValue:
    return CanonicalValue("edge", _prop_tuple(props), label)


def from_property(pv: PropertyValue) -> CanonicalValue:
    return CanonicalValue(pv.kind, pv.value)


def identity_key(v: CanonicalValue) -> tuple:
    """Equality key for dedup (collect distinct) and grouping.

    Int and Float collapse to their numeric value; node and edge collapse to
    one element family keyed by properties, dropping label and internal ids.
    """
    if v.kind == "null":
        return ("null",)
    if v.is_numeric():
        return ("num", float(v.value))
    if v.kind in ("bool", "str"):
        return (v.kind, v.value)
    if v.kind == "list":
        return ("list", tuple(identity_key(x) for x in v.items()))
    return ("elem", tuple((k, identity_key(x)) for k, x in v.value))


Record = tuple  # one result row: a tuple of CanonicalValue


@dataclass
class RecordSet:
    """A normalized query result: records of equal arity, ordered or not."""

    records: list[Record]
    ordered: bool = False

    @property
    def non_empty(self) -> bool:
        return len(self.records) > 0

    def arity(self) -> int | None:
        return len(self.records[0]) if self.records else None


# --- canonical JSON encoding -------------------------------------------------
#
# The reference engine and well-behaved bridges exchange rows in this tagged
# form; it round-trips every canonical value without loss.

def encode_value(v: CanonicalValue):
    if v.kind == "null":
        return {"t": "null"}
    if v.kind in ("bool", "int", "float", "str"):
        return {"t": v.kind, "v": v.value}
    if v.kind == "list":
        return {"t": "list", "v": [encode_value(x) for x in v.items()]}
    return {
        "t": v.kind,
        "label": v.label,
        "props": {k: encode_value(x) for k, x in v.value},
    }


def decode_value(obj) -> CanonicalValue:
    if not isinstance(obj, dict) or "t" not in obj:
        raise ValueError(f"not a tagged value: {obj!r}")
    t = obj["t"]
    if t == "null":
        return NULL
    if t in ("bool", "int", "float", "str"):
        v = obj["v"]
        if t == "bool" and not isinstance(v, bool):
            raise ValueError(f"bad bool payload {v!r}")
        if t == "int" and (isinstance(v, bool) or not isinstance(v, int)):
            raise ValueError(f"bad int payload {v!r}")
        if t == "float" and not isinstance(v, (int, float)):
            raise ValueError(f"bad float payload {v!r}")
        if t == "str" and not isinstance(v, str):
            raise ValueError(f"bad str payload {v!r}")
        return CanonicalValue(t, float(v) if t == "float" else v)
    if t == "list":
        return cv_list(decode_value(x) for x in obj["v"])
    if t in ("node", "edge"):
        props = {k: decode_value(x) for k, x in obj["props"].items()}
        return CanonicalValue(t, _prop_tuple(props), obj.get("label"))
    raise ValueError(f"unknown tag {t!r}")


def encode_records(rs: RecordSet) -> list:
    return [[encode_value(v) for v in record] for record in rs.records]


def decode_records(rows, ordered: bool = False) -> RecordSet:
    return RecordSet([tuple(decode_value(v) for v in row) for row in rows], ordered)
