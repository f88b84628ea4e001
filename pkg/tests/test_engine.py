"""Reference engine semantics, with and without injected faults.

Every fault gets three checks: the trigger query misbehaves with the fault
on, behaves with faults off, and behaves with every other fault on. The
third check is what makes a detection attributable to a single fault.
"""

import pytest

from graphdiff.canonical import (
    NULL, cv_bool, cv_float, cv_int, cv_list, cv_str, identity_key,
)
from graphdiff.cypher_parser import parse_cypher_subset
from graphdiff.engine import (
    FAULT_IDS, EvaluationError, FaultSet, GraphStore, MutationRejected,
    execute_ir,
)
from graphdiff.gremlin_parser import parse_gremlin_subset
from graphdiff.model import fixture_graph


def run_c(store, text, faults=None, allow_mutations=False):
    return execute_ir(store, parse_cypher_subset(text), faults,
                      allow_mutations)


def run_g(store, text, faults=None, allow_mutations=False):
    return execute_ir(store, parse_gremlin_subset(text), faults,
                      allow_mutations)


@pytest.fixture
def store():
    s = GraphStore()
    s.load(fixture_graph())
    return s


def rows(rs):
    return sorted(rs.records, key=repr)


class TestFaultSet:
    def test_none(self):
        assert FaultSet.none().enabled() == ()

    def test_single(self):
        assert FaultSet.single("F4").enabled() == ("F4",)
        assert FaultSet.single("f4").enabled() == ("F4",)

    def test_of(self):
        assert FaultSet.of("F1", "F9").enabled() == ("F1", "F9")

    def test_all_except(self):
        enabled = FaultSet.all_except("F2").enabled()
        assert "F2" not in enabled
        assert len(enabled) == len(FAULT_IDS) - 1

    def test_unknown_id(self):
        with pytest.raises(ValueError):
            FaultSet.single("F11")


class TestMatchSemantics:
    def test_label_scan_count(self, store):
        assert run_c(store, "MATCH (n:nt0) RETURN count(n)").records == \
            [(cv_int(2),)]

    def test_full_scan_count(self, store):
        assert run_c(store, "MATCH (n) RETURN count(n)").records == \
            [(cv_int(4),)]

    def test_comma_patterns_cross_product(self, store):
        # Homomorphic semantics: a and b may bind the same node.
        assert run_c(store, "MATCH (a), (b) RETURN count(a)").records == \
            [(cv_int(16),)]

    def test_directed_edge_scan(self, store):
        assert run_c(store, "MATCH ()-[r]->() RETURN count(r)").records == \
            [(cv_int(3),)]

    def test_undirected_doubles_orientations(self, store):
        assert run_c(store, "MATCH (n)-[r]-() RETURN count(r)").records == \
            [(cv_int(6),)]

    def test_edge_label_filter(self, store):
        assert run_c(store,
                     "MATCH ()-[r:et1]->() RETURN count(r)").records == \
            [(cv_int(1),)]

    def test_inline_prop_filter(self, store):
        rs = run_c(store, 'MATCH (n {name: "u3"}) RETURN n.p8')
        assert rs.records == [(cv_float(2.0),)]

    def test_paths_are_single_hop(self, store):
        from graphdiff.ir import UnsupportedSyntax
        with pytest.raises(UnsupportedSyntax):
            run_c(store,
                  "MATCH (a)-[r]->(b)-[s]->(c) RETURN a.name, c.name")

    def test_shared_var_joins(self, store):
        rs = run_c(store,
                   "MATCH (n)-[:et0]->(), ()-[:et1]->(n) RETURN count(n)")
        assert rs.records == [(cv_int(1),)]

    def test_returned_node_carries_label_and_props(self, store):
        rs = run_c(store, 'MATCH (n {name: "u4"}) RETURN n')
        node = rs.records[0][0]
        assert node.kind == "node"
        assert node.label == "nt1"
        assert dict(node.props())["p2"] == cv_str("GhR")


class TestWhereSemantics:
    def test_numeric_comparison(self, store):
        rs = run_c(store, "MATCH (n) WHERE n.p8 >= 2.0 RETURN n.name")
        assert [r[0].value for r in rs.records] == ["u3"]

    def test_int_float_family_compares(self, store):
        rs = run_c(store, "MATCH (n) WHERE n.p8 = 2 RETURN n.name")
        assert [r[0].value for r in rs.records] == ["u3"]

    def test_cross_type_comparison_is_null(self, store):
        # p2 is bool/str valued; > 50 never evaluates to true.
        assert run_c(store,
                     "MATCH (n) WHERE n.p2 > 50 RETURN n.name").records == []

    def test_missing_property_is_null(self, store):
        assert run_c(store,
                     "MATCH (n) WHERE n.p99 = 1 RETURN n").records == []

    def test_equality_on_strings(self, store):
        rs = run_c(store, 'MATCH (n) WHERE n.p2 = "GhR" RETURN n.name')
        assert [r[0].value for r in rs.records] == ["u4"]

    def test_cross_type_inequality_is_null_too(self, store):
        # Ternary rules apply to <> as well: bool vs str is null, and the
        # matching string compares unequal-false, so nothing survives.
        rs = run_c(store, 'MATCH (n) WHERE n.p2 <> "GhR" RETURN n.name')
        assert rs.records == []

    def test_inequality_within_one_type(self, store):
        rs = run_c(store, "MATCH (n) WHERE n.p8 <> 3.0 RETURN n.name")
        assert [r[0].value for r in rs.records] == ["u3"]

    def test_element_equality_by_identity(self, store):
        rs = run_c(store, "MATCH (a)-[r]->(b) WHERE a = b RETURN r")
        assert rs.records == []


class TestProjection:
    def test_missing_prop_projects_null(self, store):
        rs = run_c(store, 'MATCH (n {name: "u1"}) RETURN n.p8')
        assert rs.records == [(NULL,)]

    def test_count_skips_nulls(self, store):
        assert run_c(store, "MATCH (n) RETURN count(n.p8)").records == \
            [(cv_int(1),)]

    def test_sum_empty_is_null(self, store):
        assert run_c(store,
                     "MATCH (n:nt0) RETURN sum(n.p8)").records == [(NULL,)]

    def test_avg_is_always_float(self, store):
        store2 = GraphStore()
        g = fixture_graph()
        store2.load(g)
        rs = run_c(store2, "MATCH (n:nt1) RETURN avg(n.p8)")
        assert rs.records[0][0] == cv_float(2.0)

    def test_grouping_key_is_plain_columns(self, store):
        rs = run_c(store, "MATCH (n)-[r]->() RETURN n.name, count(r)")
        got = sorted((k.value, c.value) for k, c in rs.records)
        assert got == [("u1", 1), ("u2", 1), ("u3", 1)]

    def test_all_aggregate_zero_rows_yields_one_record(self, store):
        rs = run_c(store, "MATCH (n:nt3) RETURN count(n)")
        assert rs.records == [(cv_int(0),)]

    def test_grouped_zero_rows_yields_nothing(self, store):
        rs = run_c(store, "MATCH (n:nt3) RETURN n.name, count(n)")
        assert rs.records == []

    def test_collect_skips_nulls(self, store):
        rs = run_c(store, "MATCH (n) RETURN collect(n.p8)")
        assert rs.records == [(cv_list([cv_float(2.0)]),)]

    def test_collect_distinct_dedups(self, store):
        rs = run_c(store,
                   "MATCH (n)-[r]-() RETURN collect(distinct n.name)")
        names = sorted(v.value for v in rs.records[0][0].value)
        assert names == ["u1", "u2", "u3"]


class TestStages:
    def test_unwind_scalar_is_one_row(self, store):
        # Sources u1 and u2 carry a scalar p2; u3 has none, so its row is
        # dropped rather than unwound.
        rs = run_c(store, "MATCH (n)-[r]->() UNWIND n.p2 AS v RETURN v")
        assert sorted(r[0].value for r in rs.records) == [False, True]

    def test_unwind_null_is_zero_rows(self, store):
        rs = run_c(store, 'MATCH (n {name: "u1"}) UNWIND n.p99 AS v RETURN v')
        assert rs.records == []

    def test_with_passthrough(self, store):
        rs = run_c(store,
                   "MATCH (n:nt1) WITH n.p8 AS x RETURN count(x)")
        assert rs.records == [(cv_int(1),)]

    def test_with_rebinds_names(self, store):
        rs = run_c(store, "MATCH (n) WITH n.name AS nm RETURN nm")
        assert sorted(r[0].value for r in rs.records) == \
            ["u1", "u2", "u3", "u4"]


class TestGremlinSemantics:
    def test_vertex_count(self, store):
        assert run_g(store, "g.V().count()").records == [(cv_int(4),)]

    def test_edge_count(self, store):
        assert run_g(store, "g.E().count()").records == [(cv_int(3),)]

    def test_has_label(self, store):
        assert run_g(store,
                     "g.V().hasLabel('nt1').count()").records == \
            [(cv_int(2),)]

    def test_has_key(self, store):
        assert run_g(store, "g.V().has('p8').count()").records == \
            [(cv_int(1),)]

    def test_has_pred(self, store):
        assert run_g(store,
                     "g.V().has('p2', eq(true)).count()").records == \
            [(cv_int(1),)]

    def test_gt_is_numeric_only(self, store):
        assert run_g(store, "g.V().has('p2', gt(50)).count()").records == \
            [(cv_int(0),)]

    def test_value_map(self, store):
        rs = run_g(store, "g.V().hasLabel('nt1').valueMap()")
        maps = [dict(r[0].props()) for r in rs.records]
        assert {m["name"].value for m in maps} == {"u3", "u4"}
        assert all(r[0].label is None for r in rs.records)


class TestMutationGate:
    def test_cypher_create_rejected_by_default(self, store):
        with pytest.raises(MutationRejected):
            run_c(store, 'CREATE (:nt0 {name: "u9"})')

    def test_gremlin_addv_rejected_by_default(self, store):
        with pytest.raises(MutationRejected):
            run_g(store, "g.addV('nt0').property('name', 'u9')")

    def test_drop_rejected_by_default(self, store):
        with pytest.raises(MutationRejected):
            run_g(store, "g.V().drop()")

    def test_create_applies_when_allowed(self, store):
        run_c(store, 'CREATE (:nt2 {name: "u9"})', allow_mutations=True)
        assert run_c(store, "MATCH (n:nt2) RETURN count(n)").records == \
            [(cv_int(1),)]

    def test_create_edge_requires_existing_endpoints(self, store):
        with pytest.raises(EvaluationError, match="matched nothing"):
            run_c(store,
                  'MATCH (a {name: "zz"}), (b {name: "u1"}) '
                  'CREATE (a)-[:et0 {name: "e9"}]->(b)',
                  allow_mutations=True)

    def test_drop_applies_when_allowed(self, store):
        run_g(store, "g.V().drop()", allow_mutations=True)
        assert run_g(store, "g.V().count()").records == [(cv_int(0),)]
        assert run_g(store, "g.E().count()").records == [(cv_int(0),)]


class TestPurityAndDeterminism:
    def test_read_queries_leave_state_untouched(self, store):
        before = store.state_hash()
        run_c(store, "MATCH (n)-[r]-() RETURN n.name, count(r)")
        run_g(store, "g.V().valueMap()")
        assert store.state_hash() == before

    def test_mutation_changes_state_hash(self, store):
        before = store.state_hash()
        run_c(store, 'CREATE (:nt0 {name: "u9"})', allow_mutations=True)
        assert store.state_hash() != before

    def test_repeat_runs_identical(self, store):
        text = "MATCH (n)-[r]-(m) RETURN n.name, count(r)"
        assert run_c(store, text).records == run_c(store, text).records


FAULT_TRIGGERS = {
    "F1": ("cypher", "MATCH (n:nt1) RETURN count(n), avg(n.p8)"),
    "F2": ("cypher", 'MATCH (n)-[r]-() RETURN n.name, sum(r.p8)'),
    "F3": ("cypher", "MATCH (n)-[r]->() UNWIND n.p2 AS v RETURN v"),
    "F4": ("cypher", "MATCH (n:nt0)-[:et0]->(m) RETURN n, collect(m)"),
    "F5": ("cypher", "MATCH (n) WHERE n.p2 > 50 RETURN n.name"),
    "F6": ("cypher",
           "MATCH (n)-[:et0]->(), ()-[:et1]->(n) RETURN count(n)"),
    "F7": ("cypher", "MATCH ()-[r]->(n2) RETURN collect(distinct n2.p2)"),
    "F8": ("gremlin", "g.E().has('p2', without('GhR')).count()"),
    "F10": ("gremlin", "g.V().has('p2', neq('false')).valueMap()"),
}


class TestFaultIsolation:
    @pytest.mark.parametrize("fault_id", sorted(FAULT_TRIGGERS))
    def test_only_the_named_fault_changes_the_answer(self, store, fault_id):
        dialect, text = FAULT_TRIGGERS[fault_id]
        run = run_c if dialect == "cypher" else run_g
        clean = run(store, text)
        assert run(store, text, FaultSet.none()).records == clean.records
        assert run(store, text, FaultSet.single(fault_id)).records != \
            clean.records
        assert run(store, text, FaultSet.all_except(fault_id)).records == \
            clean.records

    def test_f1_count_follows_sibling_avg(self, store):
        rs = run_c(store, FAULT_TRIGGERS["F1"][1], FaultSet.single("F1"))
        assert rs.records == [(cv_int(1), cv_float(2.0))]
        clean = run_c(store, FAULT_TRIGGERS["F1"][1])
        assert clean.records == [(cv_int(2), cv_float(2.0))]

    def test_f2_empty_sum_becomes_zero(self, store):
        # No edge carries p8, so every group sums over nothing.
        faulty = run_c(store, FAULT_TRIGGERS["F2"][1], FaultSet.single("F2"))
        by_name = {k.value: v for k, v in faulty.records}
        assert by_name["u3"] == cv_int(0)
        clean = run_c(store, FAULT_TRIGGERS["F2"][1])
        assert {k.value: v for k, v in clean.records}["u3"] == NULL

    def test_f3_unwind_drops_property_rows(self, store):
        faulty = run_c(store, FAULT_TRIGGERS["F3"][1], FaultSet.single("F3"))
        assert faulty.records == []

    def test_f4_collect_emits_stubs(self, store):
        faulty = run_c(store, FAULT_TRIGGERS["F4"][1], FaultSet.single("F4"))
        collected = faulty.records[0][1]
        assert all(v.label is None and v.props() == {}
                   for v in collected.value)

    def test_f5_bool_outranks_numbers(self, store):
        faulty = run_c(store, FAULT_TRIGGERS["F5"][1], FaultSet.single("F5"))
        assert sorted(r[0].value for r in faulty.records) == ["u1", "u2"]

    def test_f6_second_pattern_loses_join(self, store):
        faulty = run_c(store, FAULT_TRIGGERS["F6"][1], FaultSet.single("F6"))
        assert faulty.records == [(cv_int(2),)]

    def test_f7_distinct_retains_null(self, store):
        faulty = run_c(store, FAULT_TRIGGERS["F7"][1], FaultSet.single("F7"))
        keys = {identity_key(v) for v in faulty.records[0][0].value}
        assert identity_key(NULL) in keys

    def test_f8_without_keeps_true_bools(self, store):
        faulty = run_g(store, FAULT_TRIGGERS["F8"][1], FaultSet.single("F8"))
        assert faulty.records == [(cv_int(1),)]
        assert run_g(store, FAULT_TRIGGERS["F8"][1]).records == [(cv_int(2),)]

    def test_f10_string_false_coerces(self, store):
        faulty = run_g(store, FAULT_TRIGGERS["F10"][1],
                       FaultSet.single("F10"))
        clean = run_g(store, FAULT_TRIGGERS["F10"][1])
        assert len(clean.records) == 3
        assert len(faulty.records) == 2


class TestTypeCacheFault:
    def _seeded(self, faults):
        s = GraphStore()
        run_g(s, "g.addV('nt5').property('p9', 13.85)"
                 ".property('test3', 'pvifo')", faults, allow_mutations=True)
        run_g(s, "g.V().drop()", faults, allow_mutations=True)
        run_g(s, "g.addV('nt5').property('p9', 13)"
                 ".property('test3', 25.6)", faults, allow_mutations=True)
        return s

    def test_f9_first_written_kind_survives_drop(self):
        s = self._seeded(FaultSet.single("F9"))
        rs = run_g(s, "g.V().valueMap()", FaultSet.single("F9"))
        props = dict(rs.records[0][0].props())
        assert props["p9"] == cv_float(13.0)
        assert props["test3"] == cv_str("25.6")

    def test_clean_writes_keep_their_kinds(self):
        s = self._seeded(FaultSet.none())
        rs = run_g(s, "g.V().valueMap()")
        props = dict(rs.records[0][0].props())
        assert props["p9"] == cv_int(13)
        assert props["test3"] == cv_float(25.6)

    def test_f9_bool_coerces_to_string_token(self):
        s = GraphStore()
        faults = FaultSet.single("F9")
        run_g(s, "g.addV('nt0').property('p2', 'x')", faults,
              allow_mutations=True)
        run_g(s, "g.addV('nt0').property('p2', true)", faults,
              allow_mutations=True)
        rs = run_g(s, "g.V().has('p2', eq('true')).count()", faults)
        assert rs.records == [(cv_int(1),)]
