"""Meaning-level comparison of normalized results.

Two engines rarely agree byte for byte: row order floats, numeric types
drift between integer and float, elements render with or without labels.
The comparator works on canonical records and asks whether the two results
could plausibly be the same answer:

  - records are multisets unless the query itself orders its output;
  - Int and Float compare numerically under a relative tolerance with an
    absolute floor near zero; Bool is not a number;
  - null equals only null: 0, "", and [] are all different from null;
  - graph elements compare by their property maps alone, because engines
    disagree on labels and internal ids for dereferenced elements.

Anything that stops the comparison from happening (timeout, one-sided engine
error, normalization failure, query outside the reference subset) yields
Incomparable, never a Discrepancy: only a completed comparison may claim two
engines disagree.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .canonical import CanonicalValue, Record, RecordSet
from .lint import mask_strings

REL_TOL = 1e-9
ABS_FLOOR = 1e-12

DISCREPANCY_KINDS = ("cardinality", "value", "null-vs-value", "missing-record")
INCOMPARABLE_REASONS = (
    "normalization-failure", "unsupported", "timeout", "engine-error",
)
UNSUPPORTED_ERROR_CLASS = "unsupported-syntax"


@dataclass(frozen=True)
class Equivalent:
    status = "equivalent"

    def to_json(self) -> dict:
        return {"status": self.status}


@dataclass(frozen=True)
class Discrepancy:
    kind: str  # one of DISCREPANCY_KINDS
    detail: str = ""

    status = "discrepancy"

    def __post_init__(self):
        if self.kind not in DISCREPANCY_KINDS:
            raise ValueError(f"unknown discrepancy kind {self.kind!r}")

    def to_json(self) -> dict:
        return {"status": self.status, "kind": self.kind, "detail": self.detail}


@dataclass(frozen=True)
class Incomparable:
    reason: str  # one of INCOMPARABLE_REASONS
    detail: str = ""

    status = "incomparable"

    def __post_init__(self):
        if self.reason not in INCOMPARABLE_REASONS:
            raise ValueError(f"unknown incomparable reason {self.reason!r}")

    def to_json(self) -> dict:
        return {"status": self.status, "reason": self.reason, "detail": self.detail}


Verdict = Equivalent | Discrepancy | Incomparable


# --- value equality ----------------------------------------------------------------

def numbers_close(a: float, b: float, rel_tol: float = REL_TOL,
                  abs_floor: float = ABS_FLOOR) -> bool:
    return math.isclose(a, b, rel_tol=rel_tol, abs_tol=abs_floor)


def values_equal(a: CanonicalValue, b: CanonicalValue,
                 rel_tol: float = REL_TOL, abs_floor: float = ABS_FLOOR) -> bool:
    if a.is_numeric() and b.is_numeric():
        return numbers_close(float(a.value), float(b.value), rel_tol, abs_floor)
    if a.kind == "null" or b.kind == "null":
        return a.kind == b.kind
    if a.is_element() and b.is_element():
        ap, bp = a.props(), b.props()
        if set(ap) != set(bp):
            return False
        return all(values_equal(ap[k], bp[k], rel_tol, abs_floor) for k in ap)
    if a.kind == "list" and b.kind == "list":
        ai, bi = a.items(), b.items()
        return len(ai) == len(bi) and all(
            values_equal(x, y, rel_tol, abs_floor) for x, y in zip(ai, bi)
        )
    if a.kind != b.kind:
        return False
    return a.value == b.value


def records_equal(a: Record, b: Record, rel_tol: float = REL_TOL,
                  abs_floor: float = ABS_FLOOR) -> bool:
    return len(a) == len(b) and all(
        values_equal(x, y, rel_tol, abs_floor) for x, y in zip(a, b)
    )


def _contains_null(v: CanonicalValue) -> bool:
    if v.kind == "null":
        return True
    if v.kind == "list":
        return any(_contains_null(x) for x in v.items())
    if v.is_element():
        return any(_contains_null(x) for x in v.props().values())
    return False


def masked_key(v: CanonicalValue) -> tuple:
    """Structural key with numeric leaves erased, for bucketing candidates
    that could match under tolerance."""
    if v.is_numeric():
        return ("num",)
    if v.kind in ("null", "bool", "str"):
        return (v.kind, v.value)
    if v.kind == "list":
        return ("list", tuple(masked_key(x) for x in v.items()))
    return ("elem", tuple((k, masked_key(x)) for k, x in v.value))


def _record_key(record: Record) -> tuple:
    return tuple(masked_key(v) for v in record)


# --- classification ----------------------------------------------------------------

def _render(record: Record) -> str:
    return "(" + ", ".join(repr(v) for v in record) + ")"


def _classify_pair(a: Record, b: Record, rel_tol: float,
                   abs_floor: float) -> Discrepancy:
    differing = [
        i for i in range(len(a))
        if not values_equal(a[i], b[i], rel_tol, abs_floor)
    ]
    null_sided = [
        i for i in differing
        if _contains_null(a[i]) != _contains_null(b[i])
    ]
    where = f"{_render(a)} vs {_render(b)}"
    if null_sided:
        col = null_sided[0] + 1
        return Discrepancy("null-vs-value", f"column {col}: {where}")
    if len(a) >= 2 and len(differing) == len(a):
        return Discrepancy("missing-record", where)
    col = differing[0] + 1 if differing else 1
    return Discrepancy("value", f"column {col}: {where}")


# --- result comparison -------------------------------------------------------------

def compare_results(left: RecordSet, right: RecordSet, ordered: bool = False,
                    rel_tol: float = REL_TOL, abs_floor: float = ABS_FLOOR) -> Verdict:
    if len(left.records) != len(right.records):
        return Discrepancy(
            "cardinality",
            f"{len(left.records)} records vs {len(right.records)} records",
        )
    if not left.records:
        return Equivalent()
    if left.arity() != right.arity():
        return Discrepancy(
            "cardinality",
            f"record arity {left.arity()} vs {right.arity()}",
        )
    if ordered:
        for a, b in zip(left.records, right.records):
            if not records_equal(a, b, rel_tol, abs_floor):
                return _classify_pair(a, b, rel_tol, abs_floor)
        return Equivalent()
    return _compare_multisets(left.records, right.records, rel_tol, abs_floor)


def _compare_multisets(left: list[Record], right: list[Record],
                       rel_tol: float, abs_floor: float) -> Verdict:
    buckets: dict[tuple, list[Record]] = {}
    for record in right:
        buckets.setdefault(_record_key(record), []).append(record)
    unmatched_left: list[Record] = []
    for record in left:
        candidates = buckets.get(_record_key(record), [])
        for i, candidate in enumerate(candidates):
            if records_equal(record, candidate, rel_tol, abs_floor):
                candidates.pop(i)
                break
        else:
            unmatched_left.append(record)
    unmatched_right = [r for bucket in buckets.values() for r in bucket]
    if not unmatched_left and not unmatched_right:
        return Equivalent()
    # equal totals were checked up front, so leftovers pair off
    return _classify_pair(unmatched_left[0], unmatched_right[0], rel_tol, abs_floor)


# --- order sensitivity -------------------------------------------------------------

def is_ordered_query(text: str, dialect: str) -> bool:
    """Lexical test: does the query itself impose an output order?"""
    masked = mask_strings(text)
    if masked is None:
        masked = text
    if dialect == "gremlin":
        return ".order(" in masked.replace(" ", "")
    return re.search(r"\bORDER\s+BY\b", masked, re.IGNORECASE) is not None


# --- execution-outcome classification ----------------------------------------------

@dataclass
class Outcome:
    """What one engine produced for one query, after normalization."""

    status: str  # "rows" | "engine-error" | "timeout" | "normalization-failure"
    records: RecordSet | None = None
    error_class: str | None = None
    detail: str = ""


def verdict_for(a: Outcome, b: Outcome, ordered: bool = False,
                rel_tol: float = REL_TOL, abs_floor: float = ABS_FLOOR) -> Verdict:
    for outcome in (a, b):
        if outcome.status == "engine-error" and \
                outcome.error_class == UNSUPPORTED_ERROR_CLASS:
            return Incomparable("unsupported", outcome.detail)
    for outcome in (a, b):
        if outcome.status == "timeout":
            return Incomparable("timeout", outcome.detail)
    if a.status == "engine-error" and b.status == "engine-error":
        if a.error_class == b.error_class:
            return Equivalent()  # both engines rejected it the same way
        return Incomparable(
            "engine-error", f"{a.error_class} vs {b.error_class}",
        )
    for outcome in (a, b):
        if outcome.status == "engine-error":
            return Incomparable(
                "engine-error", f"{outcome.error_class}: {outcome.detail}",
            )
        if outcome.status == "normalization-failure":
            return Incomparable("normalization-failure", outcome.detail)
    assert a.records is not None and b.records is not None
    return compare_results(a.records, b.records, ordered, rel_tol, abs_floor)
