import json
from collections import Counter

import pytest

from graphdiff.adapters import ReferenceAdapter
from graphdiff.generate import (
    EDGE_SERIALIZERS, GenParams, emit_load_statements, generate_graph,
    generate_schema, graph_from_json, graph_to_json, load_graph, render_value,
    save_graph, serialize_edges_piped, serialize_edges_plain,
)
from graphdiff.model import (
    Edge, GraphValidationError, LabeledPropertyGraph, Node, PropertyValue,
    pv_bool, pv_float, pv_int, pv_str, validate_graph,
)

SCHEMA = generate_schema()


class TestGenParams:
    def test_defaults(self):
        p = GenParams()
        assert p.nodes == 100
        assert p.edges == 200
        assert p.extra_pair_weights == (0.8, 0.1, 0.05, 0.05)

    def test_default_schema_sizes(self):
        assert len(SCHEMA.node_labels) == 4
        assert len(SCHEMA.edge_labels) == 4
        assert len(SCHEMA.property_keys) == 11

    def test_weights_must_sum_to_one(self):
        with pytest.raises(GraphValidationError):
            GenParams(extra_pair_weights=(0.5, 0.5, 0.5, 0.5)).validate()

    def test_weights_must_have_four_entries(self):
        with pytest.raises(GraphValidationError):
            GenParams(extra_pair_weights=(1.0,)).validate()

    def test_edges_need_two_nodes(self):
        with pytest.raises(GraphValidationError):
            GenParams(nodes=1, edges=1).validate()

    def test_negative_counts(self):
        with pytest.raises(GraphValidationError):
            GenParams(nodes=-1).validate()


class TestGenerateGraph:
    def test_counts(self):
        g = generate_graph(SCHEMA, GenParams(nodes=30, edges=50, seed=1))
        assert len(g.nodes) == 30
        assert len(g.edges) == 50

    def test_deterministic_per_seed(self):
        a = generate_graph(SCHEMA, GenParams(nodes=20, edges=40, seed=9))
        b = generate_graph(SCHEMA, GenParams(nodes=20, edges=40, seed=9))
        assert graph_to_json(a) == graph_to_json(b)

    def test_seed_changes_output(self):
        a = generate_graph(SCHEMA, GenParams(nodes=20, edges=40, seed=1))
        b = generate_graph(SCHEMA, GenParams(nodes=20, edges=40, seed=2))
        assert graph_to_json(a) != graph_to_json(b)

    def test_names_are_sequential(self):
        g = generate_graph(SCHEMA, GenParams(nodes=5, edges=6, seed=3))
        assert [n.name for n in g.nodes] == [f"u{i}" for i in range(5)]
        assert [e.name for e in g.edges] == [f"e{j}" for j in range(6)]

    def test_no_self_loops_and_valid(self):
        g = generate_graph(SCHEMA, GenParams(nodes=10, edges=60, seed=4))
        validate_graph(g)
        for e in g.edges:
            assert e.src != e.dst

    def test_labels_from_schema(self):
        g = generate_graph(SCHEMA, GenParams(nodes=40, edges=40, seed=5))
        assert {n.label for n in g.nodes} <= set(SCHEMA.node_labels)
        assert {e.label for e in g.edges} <= set(SCHEMA.edge_labels)

    def test_value_ranges(self):
        g = generate_graph(SCHEMA, GenParams(nodes=200, edges=200, seed=6))
        for element in list(g.nodes) + list(g.edges):
            for key, pv in element.properties.items():
                if key == "name":
                    continue
                if pv.kind == "int":
                    assert 0 <= pv.value < 100
                elif pv.kind == "float":
                    assert 0.0 <= pv.value < 100.0
                    assert pv.value == round(pv.value, 2)
                elif pv.kind == "str":
                    assert 1 <= len(pv.value) <= 4
                    assert pv.value.isalnum()

    def test_extra_keys_never_repeat_within_element(self):
        g = generate_graph(SCHEMA, GenParams(nodes=100, edges=100, seed=7))
        for element in list(g.nodes) + list(g.edges):
            keys = list(element.properties)
            assert len(keys) == len(set(keys))
            assert "name" in keys

    def test_extra_pair_distribution(self):
        # Coarse check; the calibrated version lives in the acceptance suite.
        g = generate_graph(SCHEMA, GenParams(nodes=3000, edges=1, seed=8))
        counts = Counter(len(n.properties) - 1 for n in g.nodes)
        total = sum(counts.values())
        for k, expected in zip((1, 2, 3, 4), (0.8, 0.1, 0.05, 0.05)):
            assert abs(counts[k] / total - expected) < 0.05


class TestRenderValue:
    def test_strings_double_quoted(self):
        assert render_value(pv_str("IF")) == '"IF"'

    def test_booleans_lowercase(self):
        assert render_value(pv_bool(True)) == "true"
        assert render_value(pv_bool(False)) == "false"

    def test_numbers(self):
        assert render_value(pv_int(69)) == "69"
        assert render_value(pv_float(69.7)) == "69.7"
        assert render_value(pv_float(2.0)) == "2.0"


def _mini_edge_graph():
    # One edge mirroring a published serialization example.
    u1 = Node(1, "nt0", {"p5": pv_str("IF"), "name": pv_str("u1")})
    u88 = Node(2, "nt0", {"p3": pv_bool(True), "name": pv_str("u88")})
    e1 = Edge(1, "et2", 1, 2, {"name": pv_str("e1"), "p9": pv_float(69.7)})
    return LabeledPropertyGraph(nodes=[u1, u88], edges=[e1])


class TestSerialization:
    def test_plain_example_line(self):
        g = _mini_edge_graph()
        assert serialize_edges_plain(g) == [
            '(nt0 {p5: "IF",name: "u1"})'
            '-(et2 {name: "e1",p9: 69.7})->'
            '(nt0 {p3: true,name: "u88"})'
        ]

    def test_piped_g0(self, g0):
        assert serialize_edges_piped(g0) == [
            '|(:nt0 {p2: true,name: "u1"})|(:et0 {p2: "GhR",name: "e1"})'
            '|(:nt0 {p2: false,name: "u2"})|',
            '|(:nt0 {p2: false,name: "u2"})|(:et0 {p2: true,name: "e2"})'
            '|(:nt1 {p8: 2.0,name: "u3"})|',
            '|(:nt1 {p8: 2.0,name: "u3"})|(:et1 {p2: false,name: "e3"})'
            '|(:nt0 {p2: true,name: "u1"})|',
        ]

    def test_plain_g0(self, g0):
        assert serialize_edges_plain(g0) == [
            '(nt0 {p2: true,name: "u1"})-(et0 {p2: "GhR",name: "e1"})'
            '->(nt0 {p2: false,name: "u2"})',
            '(nt0 {p2: false,name: "u2"})-(et0 {p2: true,name: "e2"})'
            '->(nt1 {p8: 2.0,name: "u3"})',
            '(nt1 {p8: 2.0,name: "u3"})-(et1 {p2: false,name: "e3"})'
            '->(nt0 {p2: true,name: "u1"})',
        ]

    def test_serializer_registry(self):
        assert set(EDGE_SERIALIZERS) == {"plain", "piped"}

    def test_insertion_order_preserved(self):
        # Property maps render in insertion order, not sorted.
        n = Node(1, "nt0", {"p9": pv_int(1), "p0": pv_int(2),
                            "name": pv_str("u1")})
        m = Node(2, "nt0", {"name": pv_str("u2")})
        e = Edge(1, "et0", 1, 2, {"name": pv_str("e1")})
        g = LabeledPropertyGraph(nodes=[n, m], edges=[e])
        line = serialize_edges_plain(g)[0]
        assert line.startswith('(nt0 {p9: 1,p0: 2,name: "u1"})')


class TestLoadStatements:
    def test_cypher_g0(self, g0):
        assert emit_load_statements(g0, "cypher") == [
            'CREATE (:nt0 {name: "u1", p2: true})',
            'CREATE (:nt0 {name: "u2", p2: false})',
            'CREATE (:nt1 {name: "u3", p8: 2.0})',
            'CREATE (:nt1 {name: "u4", p2: "GhR"})',
            'MATCH (a {name: "u1"}), (b {name: "u2"}) '
            'CREATE (a)-[:et0 {name: "e1", p2: "GhR"}]->(b)',
            'MATCH (a {name: "u2"}), (b {name: "u3"}) '
            'CREATE (a)-[:et0 {name: "e2", p2: true}]->(b)',
            'MATCH (a {name: "u3"}), (b {name: "u1"}) '
            'CREATE (a)-[:et1 {name: "e3", p2: false}]->(b)',
        ]

    def test_gremlin_g0(self, g0):
        assert emit_load_statements(g0, "gremlin") == [
            "g.addV('nt0').property('name', 'u1').property('p2', true)",
            "g.addV('nt0').property('name', 'u2').property('p2', false)",
            "g.addV('nt1').property('name', 'u3').property('p8', 2.0)",
            "g.addV('nt1').property('name', 'u4').property('p2', 'GhR')",
            "g.addE('et0').from(__.V().has('name', 'u1'))"
            ".to(__.V().has('name', 'u2'))"
            ".property('name', 'e1').property('p2', 'GhR')",
            "g.addE('et0').from(__.V().has('name', 'u2'))"
            ".to(__.V().has('name', 'u3'))"
            ".property('name', 'e2').property('p2', true)",
            "g.addE('et1').from(__.V().has('name', 'u3'))"
            ".to(__.V().has('name', 'u1'))"
            ".property('name', 'e3').property('p2', false)",
        ]

    def test_unknown_dialect(self, g0):
        with pytest.raises(ValueError):
            emit_load_statements(g0, "sql")


def _store_shape(store):
    nodes = sorted(
        (n.props["name"].value, n.label,
         tuple(sorted((k, v.kind, v.value) for k, v in n.props.items())))
        for n in store.nodes.values()
    )
    node_names = {nid: n.props["name"].value
                  for nid, n in store.nodes.items()}
    edges = sorted(
        (e.props["name"].value, e.label,
         node_names[e.src], node_names[e.dst],
         tuple(sorted((k, v.kind, v.value) for k, v in e.props.items())))
        for e in store.edges.values()
    )
    return nodes, edges


def _graph_shape(g):
    nodes = sorted(
        (n.name, n.label,
         tuple(sorted((k, v.kind, v.value) for k, v in n.properties.items())))
        for n in g.nodes
    )
    names = {n.id: n.name for n in g.nodes}
    edges = sorted(
        (e.name, e.label, names[e.src], names[e.dst],
         tuple(sorted((k, v.kind, v.value) for k, v in e.properties.items())))
        for e in g.edges
    )
    return nodes, edges


class TestLoadRoundTrip:
    @pytest.mark.parametrize("dialect", ["cypher", "gremlin"])
    @pytest.mark.parametrize("seed", range(20))
    def test_round_trip_matches_source(self, dialect, seed):
        g = generate_graph(SCHEMA, GenParams(nodes=8, edges=14, seed=seed))
        adapter = ReferenceAdapter(dialect=dialect)
        adapter.load(g)
        assert _store_shape(adapter.store) == _graph_shape(g)


class TestJsonPersistence:
    def test_round_trip(self, tmp_path):
        g = generate_graph(SCHEMA, GenParams(nodes=12, edges=20, seed=11))
        path = tmp_path / "g.json"
        save_graph(g, str(path))
        again = load_graph(str(path))
        assert graph_to_json(again) == graph_to_json(g)

    def test_json_tags_kinds(self, g0, tmp_path):
        path = tmp_path / "g0.json"
        save_graph(g0, str(path))
        doc = json.loads(path.read_text())
        u3 = next(n for n in doc["nodes"]
                  if n["properties"]["name"]["v"] == "u3")
        assert u3["properties"]["p8"] == {"t": "float", "v": 2.0}

    def test_from_json_restores_int_kind(self, g0):
        g = LabeledPropertyGraph(
            nodes=[Node(1, "nt0", {"name": pv_str("u1"), "p0": pv_int(5)})],
            edges=[],
        )
        again = graph_from_json(json.loads(json.dumps(graph_to_json(g))))
        assert again.nodes[0].properties["p0"] == pv_int(5)

    def test_load_rejects_invalid(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"nodes": "nope"}')
        with pytest.raises((GraphValidationError, ValueError, TypeError,
                            KeyError)):
            load_graph(str(path))
