"""Independent brute-force evaluator used to cross-check the reference engine.

Deliberately naive: pattern matching enumerates full cartesian products of
candidate elements and filters, instead of walking adjacency. It imports
only the IR, the graph model, and the canonical value types, and shares no
evaluation code with graphdiff.engine, so agreement between the two is
evidence about semantics rather than about one implementation.

Faults are out of scope here; this models correct behavior only.
"""

from __future__ import annotations

import itertools

from graphdiff.canonical import (
    NULL, CanonicalValue, cv_bool, cv_edge, cv_float, cv_int, cv_list,
    cv_node, cv_str, from_property,
)
from graphdiff.ir import (
    AddE, AddV, Avg, Collect, Count, CountStep, CypherQuery, DropStep,
    EndpointAnchor, GremlinQuery, HasKey, HasLabel, HasPred, Literal, NodePat,
    PropAccess, PropertyStep, Sum, Unwind, ValueMapStep, Var, With,
)
from graphdiff.model import LabeledPropertyGraph


class BruteforceError(Exception):
    pass


def _value_key(v: CanonicalValue):
    if v.kind == "null":
        return ("null",)
    if v.kind in ("int", "float"):
        return ("number", float(v.value))
    if v.kind in ("bool", "str"):
        return (v.kind, v.value)
    if v.kind == "list":
        return ("list", tuple(_value_key(x) for x in v.items()))
    return ("element", tuple((k, _value_key(x)) for k, x in sorted(v.props().items())))


def evaluate(graph: LabeledPropertyGraph, ir) -> list[tuple]:
    if isinstance(ir, GremlinQuery):
        return _GremlinBrute(graph).run(ir)
    if isinstance(ir, CypherQuery):
        return _CypherBrute(graph).run(ir)
    raise BruteforceError(f"cannot evaluate {type(ir).__name__}")


class _CypherBrute:
    def __init__(self, graph: LabeledPropertyGraph):
        self.graph = graph
        self.nodes = {n.id: n for n in graph.nodes}
        self.edges = {e.id: e for e in graph.edges}

    def run(self, q: CypherQuery) -> list[tuple]:
        if q.creates:
            raise BruteforceError("mutations are out of scope")
        rows = [{}]
        anon = itertools.count()
        for pattern in q.patterns:
            rows = self._join(rows, self._pattern_rows(pattern, anon))
        if q.where:
            rows = [
                row for row in rows
                if all(self._condition(row, c) is True for c in q.where)
            ]
        for stage in q.stages:
            rows = self._stage(rows, stage)
        return self._returns(rows, q.returns)

    def _pattern_rows(self, pattern, anon) -> list[dict]:
        names = []
        for np in pattern.nodes:
            names.append(np.var if np.var else f" anon{next(anon)}")
        rel_names = []
        for rp in pattern.rels:
            rel_names.append(rp.var if rp.var else f" anon{next(anon)}")
        out = []
        if len(pattern.nodes) == 1:
            np = pattern.nodes[0]
            for node in self.graph.nodes:
                if self._node_ok(node, np):
                    out.append({names[0]: ("node", node.id)})
            return out
        left_pat, right_pat = pattern.nodes
        rel_pat = pattern.rels[0]
        for a, e, b in itertools.product(self.graph.nodes, self.graph.edges,
                                         self.graph.nodes):
            if not (self._node_ok(a, left_pat) and self._node_ok(b, right_pat)):
                continue
            if not self._rel_ok(e, rel_pat):
                continue
            forward = e.src == a.id and e.dst == b.id
            backward = e.src == b.id and e.dst == a.id
            connected = {
                "out": forward,
                "in": backward,
                "both": forward or backward,
            }[rel_pat.direction]
            if rel_pat.direction == "both" and forward and backward:
                # a self-loop would satisfy both orientations; count twice
                self._emit(out, names, rel_names, a, e, b)
            if connected:
                self._emit(out, names, rel_names, a, e, b)
        return out

    @staticmethod
    def _emit(out, names, rel_names, a, e, b):
        row = {names[0]: ("node", a.id), rel_names[0]: ("edge", e.id),
               names[1]: ("node", b.id)}
        if names[0] == names[1] and a.id != b.id:
            return
        out.append(row)

    def _node_ok(self, node, pat: NodePat) -> bool:
        if pat.label is not None and node.label != pat.label:
            return False
        return self._props_ok(node.properties, pat.props)

    def _rel_ok(self, edge, pat) -> bool:
        if pat.label is not None and edge.label != pat.label:
            return False
        return self._props_ok(edge.properties, pat.props)

    @staticmethod
    def _props_ok(props, wanted) -> bool:
        for key, want in wanted:
            if key not in props:
                return False
            if _value_key(from_property(props[key])) != _value_key(want):
                return False
        return True

    @staticmethod
    def _join(left_rows, right_rows) -> list[dict]:
        out = []
        for lrow, rrow in itertools.product(left_rows, right_rows):
            shared = set(lrow) & set(rrow)
            if any(lrow[k] != rrow[k] for k in shared):
                continue
            merged = dict(lrow)
            merged.update(rrow)
            out.append(merged)
        return out

    # --- expressions ---
    def _element(self, handle):
        kind, eid = handle
        return self.nodes[eid] if kind == "node" else self.edges[eid]

    def _eval(self, row, expr):
        if isinstance(expr, Literal):
            return expr.value
        if isinstance(expr, Var):
            if expr.name not in row:
                raise BruteforceError(f"unbound {expr.name}")
            return row[expr.name]
        if isinstance(expr, PropAccess):
            if expr.var not in row:
                raise BruteforceError(f"unbound {expr.var}")
            handle = row[expr.var]
            if not isinstance(handle, tuple) or len(handle) != 2 \
                    or handle[0] not in ("node", "edge"):
                return NULL
            props = self._element(handle).properties
            if expr.key not in props:
                return NULL
            return from_property(props[expr.key])
        raise BruteforceError(f"cannot evaluate {expr!r}")

    def _condition(self, row, cond):
        a = self._eval(row, cond.left)
        b = self._eval(row, cond.right)
        a_handle = isinstance(a, tuple)
        b_handle = isinstance(b, tuple)
        if a_handle or b_handle:
            if not (a_handle and b_handle):
                return None
            if cond.op == "=":
                return a == b
            if cond.op == "<>":
                return a != b
            return None
        if a.kind == "null" or b.kind == "null":
            return None
        numeric = a.kind in ("int", "float") and b.kind in ("int", "float")
        if not numeric and a.kind != b.kind:
            return None
        if a.kind in ("node", "edge", "list") or b.kind in ("node", "edge", "list"):
            if cond.op == "=":
                return _value_key(a) == _value_key(b)
            if cond.op == "<>":
                return _value_key(a) != _value_key(b)
            return None
        x = float(a.value) if numeric else a.value
        y = float(b.value) if numeric else b.value
        if cond.op == "=":
            return x == y
        if cond.op == "<>":
            return x != y
        if cond.op == ">":
            return x > y
        if cond.op == "<":
            return x < y
        if cond.op == ">=":
            return x >= y
        return x <= y

    # --- stages ---
    def _stage(self, rows, stage):
        if isinstance(stage, With):
            return [
                {alias: self._eval(row, expr) for expr, alias in stage.items}
                for row in rows
            ]
        assert isinstance(stage, Unwind)
        out = []
        for row in rows:
            value = self._eval(row, stage.expr)
            if isinstance(value, tuple):
                parts = [value]
            elif value.kind == "null":
                parts = []
            elif value.kind == "list":
                parts = list(value.items())
            else:
                parts = [value]
            for part in parts:
                extended = dict(row)
                extended[stage.alias] = part
                out.append(extended)
        return out

    # --- returns ---
    def _concrete(self, value) -> CanonicalValue:
        if isinstance(value, tuple):
            elem = self._element(value)
            props = {k: from_property(v) for k, v in elem.properties.items()}
            if value[0] == "node":
                return cv_node(elem.label, props)
            return cv_edge(elem.label, props)
        return value

    def _returns(self, rows, returns) -> list[tuple]:
        agg_idx = {i for i, item in enumerate(returns)
                   if isinstance(item.expr, (Count, Avg, Sum, Collect))}
        if not agg_idx:
            return [
                tuple(self._concrete(self._eval(row, item.expr))
                      for item in returns)
                for row in rows
            ]
        groups: dict[tuple, dict] = {}
        for row in rows:
            plain = tuple(
                self._concrete(self._eval(row, returns[i].expr))
                for i in range(len(returns)) if i not in agg_idx
            )
            key = tuple(_value_key(v) for v in plain)
            bucket = groups.setdefault(key, {"plain": plain, "rows": []})
            bucket["rows"].append(row)
        if not groups and len(agg_idx) == len(returns):
            groups[()] = {"plain": (), "rows": []}
        out = []
        for bucket in groups.values():
            record = []
            plain_values = list(bucket["plain"])
            for i, item in enumerate(returns):
                if i in agg_idx:
                    record.append(self._aggregate(item.expr, bucket["rows"]))
                else:
                    record.append(plain_values.pop(0))
            out.append(tuple(record))
        return out

    def _aggregate(self, agg, rows) -> CanonicalValue:
        if isinstance(agg, Count):
            total = 0
            for row in rows:
                v = self._eval(row, agg.expr)
                if isinstance(v, tuple) or v.kind != "null":
                    total += 1
            return cv_int(total)
        if isinstance(agg, (Avg, Sum)):
            nums = []
            for row in rows:
                v = self._eval(row, agg.prop)
                if not isinstance(v, tuple) and v.kind in ("int", "float"):
                    nums.append(v)
            if not nums:
                return NULL
            if isinstance(agg, Avg):
                return cv_float(sum(float(v.value) for v in nums) / len(nums))
            if all(v.kind == "int" for v in nums):
                return cv_int(sum(v.value for v in nums))
            return cv_float(float(sum(v.value for v in nums)))
        assert isinstance(agg, Collect)
        items = []
        for row in rows:
            v = self._eval(row, agg.expr)
            if isinstance(v, tuple):
                items.append(self._concrete(v))
            elif v.kind != "null":
                items.append(v)
        if agg.distinct:
            seen = set()
            unique = []
            for v in items:
                key = _value_key(v)
                if key not in seen:
                    seen.add(key)
                    unique.append(v)
            items = unique
        return cv_list(items)


class _GremlinBrute:
    def __init__(self, graph: LabeledPropertyGraph):
        self.graph = graph

    def run(self, q: GremlinQuery) -> list[tuple]:
        if q.is_mutation:
            raise BruteforceError("mutations are out of scope")
        if q.source == "V":
            current = [("node", n) for n in self.graph.nodes]
        elif q.source == "E":
            current = [("edge", e) for e in self.graph.edges]
        else:
            current = []
        for step in q.steps:
            if isinstance(step, HasLabel):
                current = [(k, e) for k, e in current if e.label in step.labels]
            elif isinstance(step, HasKey):
                current = [(k, e) for k, e in current if step.key in e.properties]
            elif isinstance(step, HasPred):
                current = [(k, e) for k, e in current
                           if self._pred_ok(e, step.key, step.pred)]
            elif isinstance(step, CountStep):
                return [(cv_int(len(current)),)]
            elif isinstance(step, ValueMapStep):
                return [
                    (cv_node(None, {key: from_property(v)
                                    for key, v in e.properties.items()}),)
                    for _, e in current
                ]
            elif isinstance(step, (AddV, AddE, EndpointAnchor, PropertyStep,
                                   DropStep)):
                raise BruteforceError("mutations are out of scope")
            else:
                raise BruteforceError(f"unknown step {step!r}")
        out = []
        for kind, e in current:
            props = {key: from_property(v) for key, v in e.properties.items()}
            maker = cv_node if kind == "node" else cv_edge
            out.append((maker(e.label, props),))
        return out

    @staticmethod
    def _pred_ok(element, key: str, pred) -> bool:
        if key not in element.properties:
            return False
        value = from_property(element.properties[key])
        if pred.op == "without":
            return all(_value_key(value) != _value_key(v) for v in pred.values)
        if pred.op == "eq":
            return _value_key(value) == _value_key(pred.values[0])
        if pred.op == "neq":
            return _value_key(value) != _value_key(pred.values[0])
        assert pred.op == "gt"
        other = pred.values[0]
        both_numeric = value.kind in ("int", "float") and \
            other.kind in ("int", "float")
        if not both_numeric:
            return False
        return float(value.value) > float(other.value)
