"""Reference in-memory engine for the supported query subsets.

With all fault flags off this engine is the ground truth the comparator
trusts. Each flag F1-F10 switches on one independent, deliberately wrong
behavior modeled after a real-world engine defect; the injection suite runs
reference-vs-reference(Fk) campaigns to prove the pipeline catches each one.

Semantics with faults off:
  - MATCH enumerates homomorphic bindings (one row per binding, anonymous
    pattern elements included in the multiplicity); comma patterns join on
    shared variables.
  - WHERE is ternary: cross-type comparisons are null and null never passes.
    Int and Float form one numeric family.
  - count counts non-null values; sum/avg aggregate non-null numerics and are
    null over the empty set; collect skips nulls; collect(distinct) dedups.
  - UNWIND of a scalar is one row, of null is zero rows, of a list is one row
    per element.
  - Gremlin has(key, pred) requires the key; without() is type-sensitive;
    valueMap yields a label-less property map.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields, replace

from .canonical import (
    NULL, CanonicalValue, RecordSet, cv_bool, cv_edge, cv_float, cv_int,
    cv_list, cv_node, from_property, identity_key,
)
from .ir import (
    AddE, AddV, Avg, Collect, Comparison, Count, CountStep, CypherQuery,
    DropStep, EndpointAnchor, GremlinQuery, HasKey, HasLabel, HasPred, Literal,
    NodePat, PathPat, Pred, PropAccess, PropertyStep, QueryIR, Sum, Unwind,
    UnsupportedSyntax, ValueMapStep, Var, With,
)
from .model import (
    Edge, LabeledPropertyGraph, Node, PropertyValue, pv_float, pv_str,
)

FAULT_IDS = tuple(f"F{i}" for i in range(1, 11))


class EvaluationError(Exception):
    """The query parsed but cannot be evaluated (unknown variable etc.)."""


class MutationRejected(EvaluationError):
    """A mutating query reached an engine running in read-only mode."""


@dataclass(frozen=True)
class FaultSet:
    """Ten independent switches; all off means reference behavior."""

    f1: bool = False  # count drops property-null rows next to a property aggregate
    f2: bool = False  # sum over the empty set is 0 instead of null
    f3: bool = False  # UNWIND of a property expression yields zero rows
    f4: bool = False  # collect(node) emits property-stripped stubs
    f5: bool = False  # bool-vs-int comparison ranks booleans above all ints
    f6: bool = False  # shared-variable patterns are cross-joined
    f7: bool = False  # collect(distinct) retains null
    f8: bool = False  # without(strings) keeps only bool-true values
    f9: bool = False  # first-written type per key is cached and coerces later writes
    f10: bool = False  # eq/neq coerces the string "false" to bool false

    @staticmethod
    def none() -> "FaultSet":
        return FaultSet()

    @staticmethod
    def single(fault_id: str) -> "FaultSet":
        return FaultSet.of(fault_id)

    @staticmethod
    def of(*fault_ids: str) -> "FaultSet":
        flags = {}
        for fid in fault_ids:
            if fid.upper() not in FAULT_IDS:
                raise ValueError(f"unknown fault {fid!r}")
            flags[fid.lower()] = True
        return FaultSet(**flags)

    @staticmethod
    def all_except(fault_id: str) -> "FaultSet":
        return FaultSet.of(*(f for f in FAULT_IDS if f != fault_id.upper()))

    def enabled(self) -> tuple[str, ...]:
        return tuple(f.name.upper() for f in fields(self) if getattr(self, f.name))


@dataclass
class StoredNode:
    id: int
    label: str
    props: dict[str, PropertyValue] = field(default_factory=dict)


@dataclass
class StoredEdge:
    id: int
    label: str
    src: int
    dst: int
    props: dict[str, PropertyValue] = field(default_factory=dict)


@dataclass(frozen=True)
class Ref:
    """Binding-level handle to a stored element."""

    kind: str  # "node" | "edge"
    id: int


class GraphStore:
    """Mutable node/edge store. One store backs one engine slot."""

    def __init__(self):
        self.nodes: dict[int, StoredNode] = {}
        self.edges: dict[int, StoredEdge] = {}
        self._next_node_id = 0
        self._next_edge_id = 0
        # survives drop-all on purpose: F9 models a store-lifetime cache
        self.first_written_kind: dict[str, str] = {}

    def clear(self) -> None:
        self.nodes.clear()
        self.edges.clear()
        self._next_node_id = 0
        self._next_edge_id = 0
        self.first_written_kind.clear()

    def load(self, g: LabeledPropertyGraph) -> None:
        self.clear()
        for n in g.nodes:
            self.nodes[n.id] = StoredNode(n.id, n.label, dict(n.properties))
        for e in g.edges:
            self.edges[e.id] = StoredEdge(e.id, e.label, e.src, e.dst, dict(e.properties))
        for elem in list(self.nodes.values()) + list(self.edges.values()):
            for key, value in elem.props.items():
                self.first_written_kind.setdefault(key, value.kind)
        self._next_node_id = max(self.nodes, default=-1) + 1
        self._next_edge_id = max(self.edges, default=-1) + 1

    def export_graph(self) -> LabeledPropertyGraph:
        return LabeledPropertyGraph(
            nodes=[Node(n.id, n.label, dict(n.props))
                   for n in sorted(self.nodes.values(), key=lambda n: n.id)],
            edges=[Edge(e.id, e.label, e.src, e.dst, dict(e.props))
                   for e in sorted(self.edges.values(), key=lambda e: e.id)],
        )

    def state_hash(self) -> str:
        doc = {
            "nodes": [[n.id, n.label, [[k, v.kind, v.value] for k, v in n.props.items()]]
                      for n in sorted(self.nodes.values(), key=lambda n: n.id)],
            "edges": [[e.id, e.label, e.src, e.dst,
                       [[k, v.kind, v.value] for k, v in e.props.items()]]
                      for e in sorted(self.edges.values(), key=lambda e: e.id)],
        }
        return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()

    def add_node(self, label: str) -> StoredNode:
        node = StoredNode(self._next_node_id, label)
        self._next_node_id += 1
        self.nodes[node.id] = node
        return node

    def add_edge(self, label: str, src: int, dst: int) -> StoredEdge:
        edge = StoredEdge(self._next_edge_id, label, src, dst)
        self._next_edge_id += 1
        self.edges[edge.id] = edge
        return edge

    def drop_node(self, node_id: int) -> None:
        self.nodes.pop(node_id, None)
        self.edges = {
            eid: e for eid, e in self.edges.items()
            if e.src != node_id and e.dst != node_id
        }

    def write_property(self, element, key: str, value: PropertyValue,
                       faults: FaultSet) -> None:
        cached = self.first_written_kind.setdefault(key, value.kind)
        if faults.f9 and cached != value.kind:
            value = _coerce_to_cached_kind(value, cached)
        element.props[key] = value

    def element(self, ref: Ref):
        table = self.nodes if ref.kind == "node" else self.edges
        elem = table.get(ref.id)
        if elem is None:
            raise EvaluationError(f"dangling {ref.kind} reference {ref.id}")
        return elem


def _coerce_to_cached_kind(value: PropertyValue, cached: str) -> PropertyValue:
    if cached == "float" and value.kind == "int":
        return pv_float(float(value.value))
    if cached == "str":
        if value.kind in ("int", "float"):
            return pv_str(repr(value.value))
        if value.kind == "bool":
            return pv_str("true" if value.value else "false")
    return value  # no modeled coercion for this combination


# --- shared value comparison -----------------------------------------------------

def _canonical_eq(a: CanonicalValue, b: CanonicalValue) -> bool:
    return identity_key(a) == identity_key(b)


def _compare_3v(a: CanonicalValue, op: str, b: CanonicalValue,
                faults: FaultSet) -> bool | None:
    """Ternary comparison: None models Cypher's null result."""
    if a.kind == "null" or b.kind == "null":
        return None
    if faults.f5 and {a.kind, b.kind} == {"bool", "int"}:
        # buggy total order: every boolean ranks above every integer
        sign = 1 if a.kind == "bool" else -1
        return _apply_order(op, sign)
    if a.is_numeric() and b.is_numeric():
        return _apply_cmp(op, float(a.value), float(b.value))
    if a.kind != b.kind:
        return None
    if a.kind in ("bool", "str", "int", "float"):
        return _apply_cmp(op, a.value, b.value)
    if op == "=":
        return _canonical_eq(a, b)
    if op == "<>":
        return not _canonical_eq(a, b)
    return None  # ordering graph elements or lists is undefined


def _apply_cmp(op: str, a, b) -> bool:
    return {
        "=": lambda: a == b,
        "<>": lambda: a != b,
        ">": lambda: a > b,
        "<": lambda: a < b,
        ">=": lambda: a >= b,
        "<=": lambda: a <= b,
    }[op]()


def _apply_order(op: str, sign: int) -> bool:
    # sign > 0 means left operand ranks strictly greater
    return {
        "=": False, "<>": True,
        ">": sign > 0, ">=": sign > 0,
        "<": sign < 0, "<=": sign < 0,
    }[op]


# --- cypher evaluation -------------------------------------------------------------

_ANON = "__anon"


def _with_fresh_anons(pat: PathPat, counter: list[int]) -> PathPat:
    def fresh() -> str:
        counter[0] += 1
        return f"{_ANON}{counter[0]}"

    nodes = tuple(
        NodePat(n.var or fresh(), n.label, n.props) for n in pat.nodes
    )
    rels = tuple(replace(r, var=r.var or fresh()) for r in pat.rels)
    return PathPat(nodes=nodes, rels=rels)


class _CypherEval:
    def __init__(self, store: GraphStore, faults: FaultSet):
        self.store = store
        self.faults = faults

    def run(self, q: CypherQuery, allow_mutations: bool) -> RecordSet:
        if q.is_mutation:
            if not allow_mutations:
                raise MutationRejected("CREATE in read-only mode")
            return self._run_mutation(q)
        rows = self._match(q.patterns)
        if q.where:
            rows = [r for r in rows if self._where_passes(r, q.where)]
        for stage in q.stages:
            rows = self._apply_stage(rows, stage)
        return RecordSet(self._project(rows, q.returns))

    # --- matching ---
    def _match(self, patterns) -> list[dict]:
        if not patterns:
            return [{}]
        counter = [0]
        prepared = [_with_fresh_anons(p, counter) for p in patterns]
        if self.faults.f6 and len(prepared) == 2:
            seen = {n.var for n in prepared[0].nodes} | {r.var for r in prepared[0].rels}
            renames = {}
            second = prepared[1]
            nodes = tuple(
                replace(n, var=renames.setdefault(n.var, f"{n.var}{_ANON}x"))
                if n.var in seen else n
                for n in second.nodes
            )
            rels = tuple(
                replace(r, var=renames.setdefault(r.var, f"{r.var}{_ANON}x"))
                if r.var in seen else r
                for r in second.rels
            )
            prepared[1] = PathPat(nodes=nodes, rels=rels)
        rows = [{}]
        for pat in prepared:
            pat_rows = self._match_path(pat)
            joined = []
            for row in rows:
                for prow in pat_rows:
                    merged = self._merge(row, prow)
                    if merged is not None:
                        joined.append(merged)
            rows = joined
        return rows

    @staticmethod
    def _merge(a: dict, b: dict) -> dict | None:
        merged = dict(a)
        for k, v in b.items():
            if k in merged and merged[k] != v:
                return None
            merged[k] = v
        return merged

    def _match_path(self, pat: PathPat) -> list[dict]:
        if len(pat.nodes) == 1:
            np = pat.nodes[0]
            return [
                {np.var: Ref("node", n.id)}
                for n in self.store.nodes.values()
                if self._node_matches(n, np)
            ]
        left, right = pat.nodes
        rel = pat.rels[0]
        rows = []
        for e in self.store.edges.values():
            if rel.label and e.label != rel.label:
                continue
            if not self._props_match(e.props, rel.props):
                continue
            if rel.direction == "out":
                ends = [(e.src, e.dst)]
            elif rel.direction == "in":
                ends = [(e.dst, e.src)]
            else:
                ends = [(e.src, e.dst), (e.dst, e.src)]
            for a_id, b_id in ends:
                a, b = self.store.nodes[a_id], self.store.nodes[b_id]
                if self._node_matches(a, left) and self._node_matches(b, right):
                    row = {left.var: Ref("node", a.id), rel.var: Ref("edge", e.id),
                           right.var: Ref("node", b.id)}
                    if left.var == right.var and a.id != b.id:
                        continue
                    rows.append(row)
        return rows

    def _node_matches(self, node: StoredNode, pat: NodePat) -> bool:
        if pat.label and node.label != pat.label:
            return False
        return self._props_match(node.props, pat.props)

    @staticmethod
    def _props_match(props: dict[str, PropertyValue], wanted) -> bool:
        for key, want in wanted:
            have = props.get(key)
            if have is None or not _canonical_eq(from_property(have), want):
                return False
        return True

    # --- WHERE ---
    def _where_passes(self, row: dict, conds) -> bool:
        result: bool | None = True
        for cond in conds:
            value = self._eval_condition(row, cond)
            if value is False:
                return False
            if value is None:
                result = None
        return result is True

    def _eval_condition(self, row: dict, cond: Comparison) -> bool | None:
        left = self._eval_operand(row, cond.left)
        right = self._eval_operand(row, cond.right)
        if isinstance(left, Ref) or isinstance(right, Ref):
            if not (isinstance(left, Ref) and isinstance(right, Ref)):
                return None
            if cond.op == "=":
                return left == right
            if cond.op == "<>":
                return left != right
            return None
        return _compare_3v(left, cond.op, right, self.faults)

    def _eval_operand(self, row: dict, expr):
        match expr:
            case Literal(value=v):
                return v
            case Var(name=name):
                if name not in row:
                    raise EvaluationError(f"undefined variable {name!r}")
                return row[name]
            case PropAccess(var=var, key=key):
                if var not in row:
                    raise EvaluationError(f"undefined variable {var!r}")
                target = row[var]
                if not isinstance(target, Ref):
                    return NULL  # property access on a scalar
                pv = self.store.element(target).props.get(key)
                return from_property(pv) if pv is not None else NULL
        raise EvaluationError(f"cannot evaluate {expr!r}")

    # --- pipeline stages ---
    def _apply_stage(self, rows: list[dict], stage) -> list[dict]:
        if isinstance(stage, With):
            return [
                {alias: self._eval_operand(row, expr) for expr, alias in stage.items}
                for row in rows
            ]
        assert isinstance(stage, Unwind)
        out = []
        for row in rows:
            if self.faults.f3 and isinstance(stage.expr, PropAccess):
                continue  # buggy: unwinding a property yields nothing
            value = self._eval_operand(row, stage.expr)
            if isinstance(value, Ref):
                items = [value]
            elif value.kind == "null":
                items = []
            elif value.kind == "list":
                items = list(value.items())
            else:
                items = [value]
            for item in items:
                new_row = dict(row)
                new_row[stage.alias] = item
                out.append(new_row)
        return out

    # --- RETURN ---
    def _canonicalize(self, value) -> CanonicalValue:
        if isinstance(value, Ref):
            elem = self.store.element(value)
            props = {k: from_property(v) for k, v in elem.props.items()}
            maker = cv_node if value.kind == "node" else cv_edge
            return maker(elem.label, props)
        return value

    def _project(self, rows: list[dict], returns) -> list[tuple]:
        aggregates = [i for i, r in enumerate(returns)
                      if isinstance(r.expr, (Count, Avg, Sum, Collect))]
        if not aggregates:
            return [
                tuple(self._canonicalize(self._eval_operand(row, r.expr))
                      for r in returns)
                for row in rows
            ]
        plain = [i for i in range(len(returns)) if i not in set(aggregates)]
        groups: dict[tuple, list[dict]] = {}
        group_values: dict[tuple, tuple] = {}
        for row in rows:
            values = tuple(
                self._canonicalize(self._eval_operand(row, returns[i].expr))
                for i in plain
            )
            key = tuple(identity_key(v) for v in values)
            groups.setdefault(key, []).append(row)
            group_values.setdefault(key, values)
        if not rows and not plain:
            groups[()] = []  # global aggregation over zero rows still yields a row
            group_values[()] = ()
        records = []
        for key, group_rows in groups.items():
            record: list[CanonicalValue] = []
            plain_iter = iter(group_values[key])
            for i, item in enumerate(returns):
                if i in set(aggregates):
                    record.append(self._aggregate(item.expr, group_rows, returns))
                else:
                    record.append(next(plain_iter))
            records.append(tuple(record))
        return records

    def _aggregate(self, agg, rows: list[dict], returns) -> CanonicalValue:
        if isinstance(agg, Count):
            counted = rows
            if self.faults.f1 and isinstance(agg.expr, Var):
                # buggy: a sibling property aggregate makes count require the
                # aggregated property to be present
                needed = [
                    r.expr.prop for r in returns
                    if isinstance(r.expr, (Avg, Sum)) and r.expr.prop.var == agg.expr.name
                ]
                if needed:
                    counted = [
                        row for row in rows
                        if all(self._eval_operand(row, p).kind != "null" for p in needed)
                    ]
            n = 0
            for row in counted:
                v = self._eval_operand(row, agg.expr)
                if isinstance(v, Ref) or v.kind != "null":
                    n += 1
            return cv_int(n)
        if isinstance(agg, (Avg, Sum)):
            values = []
            for row in rows:
                v = self._eval_operand(row, agg.prop)
                if not isinstance(v, Ref) and v.is_numeric():
                    values.append(v)
            if not values:
                if isinstance(agg, Sum) and self.faults.f2:
                    return cv_int(0)  # buggy: empty sum collapses to 0
                return NULL
            total = sum(v.value for v in values)
            if isinstance(agg, Avg):
                return cv_float(total / len(values))
            if all(v.kind == "int" for v in values):
                return cv_int(total)
            return cv_float(float(total))
        assert isinstance(agg, Collect)
        collected = []
        for row in rows:
            v = self._eval_operand(row, agg.expr)
            if isinstance(v, Ref):
                if self.faults.f4:
                    # buggy: collected elements lose their properties
                    collected.append(cv_node(None, {}))
                else:
                    collected.append(self._canonicalize(v))
            elif v.kind != "null" or (agg.distinct and self.faults.f7):
                collected.append(v)
        if agg.distinct:
            seen = set()
            deduped = []
            for v in collected:
                key = identity_key(v)
                if key not in seen:
                    seen.add(key)
                    deduped.append(v)
            collected = deduped
        return cv_list(collected)

    # --- mutations ---
    def _run_mutation(self, q: CypherQuery) -> RecordSet:
        rows = self._match(q.patterns)
        if q.patterns and not rows:
            raise EvaluationError("CREATE endpoints matched nothing")
        for row in rows:
            for pat in q.creates:
                self._create_path(row, pat)
        return RecordSet([])

    def _create_path(self, row: dict, pat: PathPat) -> None:
        if len(pat.nodes) == 1:
            np = pat.nodes[0]
            if np.label is None:
                raise EvaluationError("CREATE node needs a label")
            node = self.store.add_node(np.label)
            for key, value in np.props:
                self.store.write_property(node, key, _to_property(value), self.faults)
            return
        left, right = pat.nodes
        rel = pat.rels[0]
        if rel.direction != "out" or rel.label is None:
            raise EvaluationError("CREATE edge needs a directed typed relationship")
        src = self._endpoint(row, left)
        dst = self._endpoint(row, right)
        edge = self.store.add_edge(rel.label, src, dst)
        for key, value in rel.props:
            self.store.write_property(edge, key, _to_property(value), self.faults)

    def _endpoint(self, row: dict, np: NodePat) -> int:
        if np.var is None or np.var not in row:
            raise EvaluationError("CREATE edge endpoints must be bound variables")
        ref = row[np.var]
        if not isinstance(ref, Ref) or ref.kind != "node":
            raise EvaluationError("CREATE edge endpoints must be nodes")
        return ref.id


def _to_property(v: CanonicalValue) -> PropertyValue:
    if v.kind in ("int", "float", "str", "bool"):
        return PropertyValue(v.kind, v.value)
    raise EvaluationError(f"cannot store {v.kind} as a property")


# --- gremlin evaluation ------------------------------------------------------------

class _GremlinEval:
    def __init__(self, store: GraphStore, faults: FaultSet):
        self.store = store
        self.faults = faults

    def run(self, q: GremlinQuery, allow_mutations: bool) -> RecordSet:
        if q.is_mutation and not allow_mutations:
            raise MutationRejected("mutating traversal in read-only mode")
        if q.source == "V":
            objs: list = [Ref("node", n.id) for n in self.store.nodes.values()]
        elif q.source == "E":
            objs = [Ref("edge", e.id) for e in self.store.edges.values()]
        else:
            objs = []
        pending_edge: dict | None = None
        for step in q.steps:
            match step:
                case HasLabel(labels=labels):
                    objs = [o for o in objs if isinstance(o, Ref)
                            and self.store.element(o).label in labels]
                case HasKey(key=key):
                    objs = [o for o in objs if isinstance(o, Ref)
                            and key in self.store.element(o).props]
                case HasPred(key=key, pred=pred):
                    objs = [o for o in objs if isinstance(o, Ref)
                            and self._has_passes(o, key, pred)]
                case CountStep():
                    objs = [cv_int(len(objs))]
                case ValueMapStep():
                    objs = [self._value_map(o) for o in objs if isinstance(o, Ref)]
                case AddV(label=label):
                    node = self.store.add_node(label)
                    objs = [Ref("node", node.id)]
                case AddE(label=label):
                    pending_edge = {"label": label}
                case EndpointAnchor(end=end, key=key, value=value):
                    if pending_edge is None:
                        raise EvaluationError(f"{end}() without addE()")
                    pending_edge[end] = self._anchor_node(key, value)
                    if "from" in pending_edge and "to" in pending_edge:
                        edge = self.store.add_edge(
                            pending_edge["label"], pending_edge["from"],
                            pending_edge["to"],
                        )
                        objs = [Ref("edge", edge.id)]
                        pending_edge = None
                case PropertyStep(key=key, value=value):
                    if pending_edge is not None:
                        raise EvaluationError("property() before edge endpoints")
                    wrote = False
                    for o in objs:
                        if isinstance(o, Ref):
                            self.store.write_property(
                                self.store.element(o), key, _to_property(value),
                                self.faults,
                            )
                            wrote = True
                    if not wrote:
                        raise EvaluationError("property() on an empty traversal")
                case DropStep():
                    for o in objs:
                        if not isinstance(o, Ref):
                            continue
                        if o.kind == "node":
                            self.store.drop_node(o.id)
                        else:
                            self.store.edges.pop(o.id, None)
                    objs = []
        if pending_edge is not None:
            raise EvaluationError("addE() without both endpoints")
        return RecordSet([(self._finalize(o),) for o in objs])

    def _anchor_node(self, key: str, value: CanonicalValue) -> int:
        matches = [
            n.id for n in self.store.nodes.values()
            if key in n.props and _canonical_eq(from_property(n.props[key]), value)
        ]
        if len(matches) != 1:
            raise EvaluationError(
                f"edge endpoint lookup {key}={value!r} matched {len(matches)} nodes"
            )
        return matches[0]

    def _has_passes(self, ref: Ref, key: str, pred: Pred) -> bool:
        props = self.store.element(ref).props
        if key not in props:
            return False  # missing key never passes a predicate
        value = from_property(props[key])
        if pred.op == "without":
            if self.faults.f8 and all(v.kind == "str" for v in pred.values):
                # buggy: string exclusion keeps only boolean-true values
                return value.kind == "bool" and value.value is True
            return all(not _canonical_eq(value, v) for v in pred.values)
        if pred.op in ("eq", "neq"):
            other = pred.values[0]
            if (self.faults.f10 and value.kind == "bool"
                    and other.kind == "str" and other.value == "false"):
                other = cv_bool(False)
            equal = _canonical_eq(value, other)
            return equal if pred.op == "eq" else not equal
        assert pred.op == "gt"
        return _compare_3v(value, ">", pred.values[0], self.faults) is True

    def _value_map(self, ref: Ref) -> CanonicalValue:
        elem = self.store.element(ref)
        return cv_node(None, {k: from_property(v) for k, v in elem.props.items()})

    def _finalize(self, obj) -> CanonicalValue:
        if isinstance(obj, Ref):
            elem = self.store.element(obj)
            props = {k: from_property(v) for k, v in elem.props.items()}
            maker = cv_node if obj.kind == "node" else cv_edge
            return maker(elem.label, props)
        return obj


def execute_ir(store: GraphStore, ir: QueryIR, faults: FaultSet | None = None,
               allow_mutations: bool = False) -> RecordSet:
    faults = faults or FaultSet()
    if isinstance(ir, GremlinQuery):
        return _GremlinEval(store, faults).run(ir, allow_mutations)
    if isinstance(ir, CypherQuery):
        return _CypherEval(store, faults).run(ir, allow_mutations)
    raise UnsupportedSyntax(type(ir).__name__)
