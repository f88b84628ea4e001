"""Random graph generation and the serializations built on top of it.

Generation is seed-deterministic: labels are drawn uniformly, every element
gets a unique "name" plus 1-4 extra property pairs (weighted 0.8/0.1/0.05/0.05)
whose keys are sampled without repetition and whose values get a uniformly
random type. Edges connect two distinct uniformly chosen nodes; parallel edges
are allowed, self-loops are not.
"""

from __future__ import annotations

import json
import random
import string
from dataclasses import dataclass, field

from .model import (
    NAME_KEY,
    Edge,
    GraphSchema,
    GraphValidationError,
    LabeledPropertyGraph,
    Node,
    PropertyValue,
    pv_str,
    validate_graph,
)

GRAPH_SCHEMA_TAG = "graphdiff/graph-v1"

_VALUE_KINDS = ("int", "float", "str", "bool")
_STR_ALPHABET = string.ascii_letters + string.digits


@dataclass
class GenParams:
    """Knobs for one generated graph. Defaults mirror the experiment setup."""

    nodes: int = 100
    edges: int = 200
    extra_pair_weights: tuple[float, ...] = (0.8, 0.1, 0.05, 0.05)  # for 1..4 pairs
    str_len: tuple[int, int] = (1, 4)
    float_range: tuple[float, float] = (0.0, 100.0)
    int_range: tuple[int, int] = (0, 100)  # half-open
    seed: int = 0

    def validate(self) -> None:
        w = self.extra_pair_weights
        if len(w) != 4 or any(x < 0 for x in w):
            raise GraphValidationError("extra_pair_weights needs 4 non-negative entries")
        if abs(sum(w) - 1.0) > 1e-9:
            raise GraphValidationError("extra_pair_weights must sum to 1")
        if self.nodes < 0 or self.edges < 0:
            raise GraphValidationError("node and edge counts must be non-negative")
        if self.edges > 0 and self.nodes < 2:
            raise GraphValidationError("edges need at least 2 nodes")


def generate_schema(node_labels: int = 4, edge_labels: int = 4,
                    property_keys: int = 11) -> GraphSchema:
    """Schema with names nt0.., et0.., and "name", p0.. for property keys."""
    if property_keys < 1:
        raise GraphValidationError("schema needs at least the name property key")
    return GraphSchema(
        node_labels=tuple(f"nt{i}" for i in range(node_labels)),
        edge_labels=tuple(f"et{i}" for i in range(edge_labels)),
        property_keys=(NAME_KEY,) + tuple(f"p{i}" for i in range(property_keys - 1)),
    )


def _sample_value(rng: random.Random, params: GenParams) -> PropertyValue:
    kind = rng.choice(_VALUE_KINDS)
    if kind == "int":
        lo, hi = params.int_range
        return PropertyValue("int", rng.randrange(lo, hi))
    if kind == "float":
        lo, hi = params.float_range
        return PropertyValue("float", round(rng.uniform(lo, hi), 2))
    if kind == "str":
        n = rng.randint(*params.str_len)
        return PropertyValue("str", "".join(rng.choice(_STR_ALPHABET) for _ in range(n)))
    return PropertyValue("bool", rng.random() < 0.5)


def _sample_properties(rng: random.Random, schema: GraphSchema, params: GenParams,
                       name: str) -> dict[str, PropertyValue]:
    count = rng.choices((1, 2, 3, 4), weights=params.extra_pair_weights)[0]
    count = min(count, len(schema.extra_property_keys))
    keys = rng.sample(schema.extra_property_keys, count)
    pairs = [(k, _sample_value(rng, params)) for k in keys]
    # "name" lands at a random position so serialized maps vary like real data
    pairs.insert(rng.randint(0, len(pairs)), (NAME_KEY, pv_str(name)))
    return dict(pairs)


def generate_graph(schema: GraphSchema, params: GenParams) -> LabeledPropertyGraph:
    params.validate()
    rng = random.Random(params.seed)
    g = LabeledPropertyGraph()
    for i in range(params.nodes):
        props = _sample_properties(rng, schema, params, f"u{i}")
        g.nodes.append(Node(i, rng.choice(schema.node_labels), props))
    for j in range(params.edges):
        src = rng.randrange(params.nodes)
        dst = rng.randrange(params.nodes - 1)
        if dst >= src:
            dst += 1
        props = _sample_properties(rng, schema, params, f"e{j}")
        g.edges.append(Edge(j, rng.choice(schema.edge_labels), src, dst, props))
    validate_graph(g)
    return g


# --- prompt serializations ----------------------------------------------------

def render_value(pv: PropertyValue) -> str:
    """Render a property value the way prompts and Cypher expect it."""
    if pv.kind == "str":
        return '"' + pv.value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if pv.kind == "bool":
        return "true" if pv.value else "false"
    return repr(pv.value)


def _render_props(props: dict[str, PropertyValue]) -> str:
    return "{" + ",".join(f"{k}: {render_value(v)}" for k, v in props.items()) + "}"


def serialize_edges_plain(g: LabeledPropertyGraph) -> list[str]:
    """One `(label {..})-(label {..})->(label {..})` line per edge."""
    lines = []
    for e in g.edges:
        src = g.node_by_id(e.src)
        dst = g.node_by_id(e.dst)
        lines.append(
            f"({src.label} {_render_props(src.properties)})"
            f"-({e.label} {_render_props(e.properties)})"
            f"->({dst.label} {_render_props(dst.properties)})"
        )
    return lines


def serialize_edges_piped(g: LabeledPropertyGraph) -> list[str]:
    """One `|(:label {..})|(:label {..})|(:label {..})|` line per edge."""
    lines = []
    for e in g.edges:
        src = g.node_by_id(e.src)
        dst = g.node_by_id(e.dst)
        lines.append(
            f"|(:{src.label} {_render_props(src.properties)})"
            f"|(:{e.label} {_render_props(e.properties)})"
            f"|(:{dst.label} {_render_props(dst.properties)})|"
        )
    return lines


EDGE_SERIALIZERS = {
    "plain": serialize_edges_plain,
    "piped": serialize_edges_piped,
}


# --- load statements ------------------------------------------------------------

def _gremlin_literal(pv: PropertyValue) -> str:
    if pv.kind == "str":
        return "'" + pv.value.replace("\\", "\\\\").replace("'", "\\'") + "'"
    if pv.kind == "bool":
        return "true" if pv.value else "false"
    return repr(pv.value)


def _ordered_props(props: dict[str, PropertyValue]) -> list[tuple[str, PropertyValue]]:
    rest = [(k, v) for k, v in props.items() if k != NAME_KEY]
    return [(NAME_KEY, props[NAME_KEY])] + rest


def emit_load_statements(g: LabeledPropertyGraph, dialect: str) -> list[str]:
    """Statements that rebuild the graph inside an engine, nodes first.

    Cypher creates nodes directly and wires edges with a MATCH-by-name;
    Gremlin chains addV/addE traversals. Both are replayable through the
    reference engine, which the round-trip tests rely on.
    """
    stmts = []
    if dialect == "cypher":
        for n in g.nodes:
            props = ", ".join(f"{k}: {render_value(v)}" for k, v in _ordered_props(n.properties))
            stmts.append(f"CREATE (:{n.label} {{{props}}})")
        for e in g.edges:
            src = g.node_by_id(e.src)
            dst = g.node_by_id(e.dst)
            props = ", ".join(f"{k}: {render_value(v)}" for k, v in _ordered_props(e.properties))
            stmts.append(
                f'MATCH (a {{name: "{src.name}"}}), (b {{name: "{dst.name}"}}) '
                f"CREATE (a)-[:{e.label} {{{props}}}]->(b)"
            )
    elif dialect == "gremlin":
        for n in g.nodes:
            chain = "".join(
                f".property({_gremlin_literal(pv_str(k))}, {_gremlin_literal(v)})"
                for k, v in _ordered_props(n.properties)
            )
            stmts.append(f"g.addV('{n.label}'){chain}")
        for e in g.edges:
            src = g.node_by_id(e.src)
            dst = g.node_by_id(e.dst)
            chain = "".join(
                f".property({_gremlin_literal(pv_str(k))}, {_gremlin_literal(v)})"
                for k, v in _ordered_props(e.properties)
            )
            stmts.append(
                f"g.addE('{e.label}')"
                f".from(__.V().has('name', '{src.name}'))"
                f".to(__.V().has('name', '{dst.name}')){chain}"
            )
    else:
        raise ValueError(f"unknown dialect {dialect!r}")
    return stmts


# --- JSON interchange -----------------------------------------------------------

def _props_to_json(props: dict[str, PropertyValue]) -> dict:
    return {k: {"t": v.kind, "v": v.value} for k, v in props.items()}


def _props_from_json(obj: dict) -> dict[str, PropertyValue]:
    props = {}
    for k, tagged in obj.items():
        if not isinstance(tagged, dict) or set(tagged) != {"t", "v"}:
            raise GraphValidationError(f"property {k!r} is not a tagged value")
        v = tagged["v"]
        if tagged["t"] == "float" and isinstance(v, int) and not isinstance(v, bool):
            v = float(v)
        props[k] = PropertyValue(tagged["t"], v)
    return props


def graph_to_json(g: LabeledPropertyGraph) -> dict:
    return {
        "schema": GRAPH_SCHEMA_TAG,
        "nodes": [
            {"id": n.id, "label": n.label, "properties": _props_to_json(n.properties)}
            for n in g.nodes
        ],
        "edges": [
            {"id": e.id, "label": e.label, "src": e.src, "dst": e.dst,
             "properties": _props_to_json(e.properties)}
            for e in g.edges
        ],
    }


def graph_from_json(obj: dict) -> LabeledPropertyGraph:
    if obj.get("schema") != GRAPH_SCHEMA_TAG:
        raise GraphValidationError(f"unknown graph schema tag {obj.get('schema')!r}")
    g = LabeledPropertyGraph(
        nodes=[
            Node(n["id"], n["label"], _props_from_json(n["properties"]))
            for n in obj["nodes"]
        ],
        edges=[
            Edge(e["id"], e["label"], e["src"], e["dst"], _props_from_json(e["properties"]))
            for e in obj["edges"]
        ],
    )
    validate_graph(g)
    return g


def save_graph(g: LabeledPropertyGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(graph_to_json(g), f, indent=2, sort_keys=True)
        f.write("\n")


def load_graph(path: str) -> LabeledPropertyGraph:
    with open(path, encoding="utf-8") as f:
        return graph_from_json(json.load(f))
