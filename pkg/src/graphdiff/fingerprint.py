"""Lexical operator fingerprints used for discrepancy clustering.

A fingerprint is the set of operator tokens appearing in a query, computed
with string literals masked so text inside quotes never counts. It works on
any query text, parseable or not, which is what makes it usable as a dedup
key for queries only external engines can run.
"""

from __future__ import annotations

import re

from .ir import (
    Avg, Collect, Comparison, Count, CypherQuery, GremlinQuery, QueryIR,
    Sum, Unwind, With,
)
from .lint import mask_strings

CYPHER_MULTIWORD = {
    ("OPTIONAL", "MATCH"): "OPTIONAL MATCH",
    ("ORDER", "BY"): "ORDER BY",
    ("UNION", "ALL"): "UNION ALL",
}

CYPHER_VOCABULARY = frozenset({
    "MATCH", "OPTIONAL MATCH", "WHERE", "RETURN", "ORDER BY", "WITH", "UNWIND",
    "UNION", "UNION ALL", "FOREACH", "COLLECT", "PREDICATE", "COALESCE",
    "LENGTH", "TYPE", "KEYS", "LABELS", "STARTNODE", "ENDNODE", "NODES",
    "RELATIONSHIPS", "REDUCE", "SHORTESTPATH", "COUNT", "AVG", "SUM", "MIN",
    "MAX", "DISTINCT", "AS", "AND", "OR", "XOR", "NOT", "IN", "CONTAINS",
    "STARTS", "ENDS", "IS", "NULL", "SKIP", "LIMIT", "CREATE", "MERGE", "SET",
    "DELETE", "DETACH", "REMOVE", "DROP", "LOAD", "CASE", "WHEN", "THEN",
    "ELSE", "END", "EXISTS", "ALL", "ANY", "NONE", "SINGLE", "ASC", "DESC",
    "RAND", "ID", "SIZE", "HEAD", "LAST", "ABS", "ROUND", "TOINTEGER",
    "TOSTRING", "TOFLOAT", "EXTRACT", "FILTER",
})

GREMLIN_VOCABULARY = frozenset({
    "V", "E", "hasLabel", "hasId", "has", "hasNot", "values", "label", "id",
    "properties", "valueMap", "elementMap", "select", "dedup", "local",
    "order", "by", "where", "filter", "match", "eq", "neq", "gt", "gte",
    "lt", "lte", "inside", "outside", "between", "within", "without", "group",
    "groupCount", "in", "out", "inE", "outE", "inV", "outV", "bothV", "both",
    "bothE", "path", "repeat", "until", "times", "emit", "sum", "max", "min",
    "mean", "contains", "choose", "union", "fold", "unfold", "count", "addV",
    "addE", "property", "drop", "mergeV", "mergeE", "sample", "coin",
    "shuffle", "limit", "skip", "range", "tail", "store", "aggregate", "cap",
    "sideEffect", "constant", "coalesce", "optional", "project", "map",
    "flatMap", "identity", "simplePath", "from", "to", "not", "and", "or",
    "is", "as", "value", "key", "otherV", "subgraph", "tree", "toList",
    "iterate", "next", "barrier", "index", "loops", "pageRank",
})

_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_CALL_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*\(")


def operator_fingerprint(text: str, dialect: str) -> frozenset[str]:
    masked = mask_strings(text)
    if masked is None:
        masked = text  # unterminated literal; fingerprint the raw text
    if dialect == "gremlin":
        return _gremlin_fingerprint(masked)
    if dialect == "cypher":
        return _cypher_fingerprint(masked)
    raise ValueError(f"unknown dialect {dialect!r}")


def _cypher_fingerprint(masked: str) -> frozenset[str]:
    words = [(m.group(0), m.start()) for m in _WORD_RE.finditer(masked)]
    ops: set[str] = set()
    i = 0
    while i < len(words):
        word, pos = words[i]
        upper = word.upper()
        if i + 1 < len(words):
            pair = (upper, words[i + 1][0].upper())
            if pair in CYPHER_MULTIWORD:
                ops.add(CYPHER_MULTIWORD[pair])
                i += 2
                continue
        if upper in CYPHER_VOCABULARY:
            # skip property accesses like n.type and labels like (x:TYPE)
            if not _is_name_position(masked, pos):
                ops.add(upper)
        elif word.isupper() and len(word) >= 2 and not _is_name_position(masked, pos):
            ops.add(f"UNKNOWN:{upper}")
        i += 1
    return frozenset(ops)


def _is_name_position(masked: str, pos: int) -> bool:
    """True when the word at pos is a property key or label, not an operator."""
    j = pos - 1
    while j >= 0 and masked[j].isspace():
        j -= 1
    if j >= 0 and masked[j] in ".:":
        return True  # property access or label
    word_end = _WORD_RE.match(masked, pos).end()
    k = word_end
    while k < len(masked) and masked[k].isspace():
        k += 1
    return k < len(masked) and masked[k] == ":"  # property-map key


def _gremlin_fingerprint(masked: str) -> frozenset[str]:
    ops: set[str] = set()
    for m in _CALL_RE.finditer(masked):
        name = m.group(1)
        if name in ("g", "__"):
            continue
        if name in GREMLIN_VOCABULARY:
            ops.add(name)
        else:
            ops.add(f"UNKNOWN:{name}")
    # enum-style bare tokens (order arguments and friends)
    for word in ("shuffle", "decr", "incr", "asc", "desc"):
        if re.search(rf"\b{word}\b(?!\s*\()", masked):
            ops.add(word if word in GREMLIN_VOCABULARY else f"UNKNOWN:{word}")
    return frozenset(ops)


def ir_operator_tokens(ir: QueryIR) -> frozenset[str]:
    """Operators implied by a parsed IR; always a subset of the fingerprint."""
    ops: set[str] = set()
    if isinstance(ir, GremlinQuery):
        if ir.source:
            ops.add(ir.source)
        for step in ir.steps:
            name = {
                "HasLabel": "hasLabel", "HasKey": "has", "HasPred": "has",
                "CountStep": "count", "ValueMapStep": "valueMap", "AddV": "addV",
                "AddE": "addE", "PropertyStep": "property", "DropStep": "drop",
            }.get(type(step).__name__)
            if name:
                ops.add(name)
            if type(step).__name__ == "HasPred" and step.pred.op != "eq":
                ops.add(step.pred.op)
            if type(step).__name__ == "EndpointAnchor":
                ops.update((step.end, "V", "has"))
        return frozenset(ops)
    assert isinstance(ir, CypherQuery)
    if ir.patterns:
        ops.add("MATCH")
    if ir.where:
        ops.add("WHERE")
        if len(ir.where) > 1:
            ops.add("AND")
    for stage in ir.stages:
        if isinstance(stage, With):
            ops.add("WITH")
            if stage.items and any(alias != getattr(e, "name", None)
                                   for e, alias in stage.items):
                ops.add("AS")
        elif isinstance(stage, Unwind):
            ops.update(("UNWIND", "AS"))
    if ir.returns:
        ops.add("RETURN")
    for item in ir.returns:
        expr = item.expr
        if item.alias:
            ops.add("AS")
        if isinstance(expr, Count):
            ops.add("COUNT")
        elif isinstance(expr, Avg):
            ops.add("AVG")
        elif isinstance(expr, Sum):
            ops.add("SUM")
        elif isinstance(expr, Collect):
            ops.add("COLLECT")
            if expr.distinct:
                ops.add("DISTINCT")
    if ir.creates:
        ops.add("CREATE")
    return frozenset(ops)
