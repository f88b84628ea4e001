"""Fault-injection self-test for the whole detection pipeline.

Each scenario pairs a clean reference engine against one running with a
single fault flag and replays trigger queries through the same path a
campaign uses: fingerprint, execute, normalize, compare. A fault counts as
detected when at least one trigger query ends in a Discrepancy whose
operator fingerprint contains the scenario's trigger operator, which is the
evidence a real campaign would file the bug under.

Run with faults disabled on both sides, every scenario must come back clean;
that is the false-positive guard for the pipeline itself.
"""

from __future__ import annotations

from dataclasses import dataclass

from .adapters import EngineAdapter, EngineError, ReferenceAdapter, Rows, Timeout
from .campaign import dedup_discrepancies
from .compare import Outcome, verdict_for
from .engine import FaultSet
from .fingerprint import operator_fingerprint
from .model import fixture_graph
from .normalize import NormalizationError, normalize_result


@dataclass(frozen=True)
class FaultScenario:
    fault_id: str
    dialect: str
    trigger_op: str  # fingerprint token the discrepancy must carry
    queries: tuple[str, ...]
    setup: tuple[str, ...] = ()  # mutations applied to both engines first
    graph: str = "fixture"  # "fixture" | "empty"


SCENARIOS: tuple[FaultScenario, ...] = (
    FaultScenario(
        "F1", "cypher", "AVG",
        ("MATCH (n:nt1) RETURN count(n), avg(n.p8)",),
    ),
    FaultScenario(
        "F2", "cypher", "SUM",
        ("MATCH (n:nt1)-[r]-() RETURN n.name, sum(r.p8)",),
    ),
    FaultScenario(
        "F3", "cypher", "UNWIND",
        ("MATCH (n)-[r]->() UNWIND n.p2 AS values RETURN values",),
    ),
    FaultScenario(
        "F4", "cypher", "COLLECT",
        ("MATCH (n:nt0)-[:et0]->(m) RETURN n, collect(m)",),
    ),
    FaultScenario(
        "F5", "cypher", "WHERE",
        ("MATCH (n) WHERE n.p2 > 50 RETURN n.name",),
    ),
    FaultScenario(
        "F6", "cypher", "MATCH",
        ("MATCH (n)-[:et0]->(), ()-[:et1]->(n) RETURN count(n)",),
    ),
    FaultScenario(
        "F7", "cypher", "DISTINCT",
        ("MATCH ()-[r]->(n2) RETURN collect(distinct n2.p2)",),
    ),
    FaultScenario(
        "F8", "gremlin", "without",
        ("g.E().has('p2', without('GhR')).count()",),
    ),
    FaultScenario(
        "F9", "gremlin", "valueMap",
        ("g.V().valueMap()",),
        setup=(
            "g.addV('nt5').property('p9', 13.85).property('test3', 'pvifo')",
            "g.V().drop()",
            "g.addV('nt5').property('p9', 13).property('test3', 25.6)",
        ),
        graph="empty",
    ),
    FaultScenario(
        "F10", "gremlin", "neq",
        ("g.V().has('p2', neq('false')).valueMap()",),
    ),
)


class InjectionError(Exception):
    """A scenario could not even be set up; the suite is broken, not red."""


def _outcome(adapter: EngineAdapter, text: str) -> Outcome:
    result = adapter.execute(text)
    if isinstance(result, Timeout):
        return Outcome("timeout", detail=f"{result.seconds}s")
    if isinstance(result, EngineError):
        return Outcome("engine-error", error_class=result.error_class,
                       detail=result.message)
    assert isinstance(result, Rows)
    try:
        records = normalize_result(result.rows, adapter.capabilities().style,
                                    executor=lambda q: adapter.execute(q))
    except NormalizationError as exc:
        return Outcome("normalization-failure", detail=str(exc))
    return Outcome("rows", records=records)


def _reference_factory(dialect: str, name: str, faults: FaultSet) -> EngineAdapter:
    return ReferenceAdapter(dialect, name=name, faults=faults,
                            allow_mutations=True)


def run_scenario(scenario: FaultScenario, inject: bool = True,
                 adapter_factory=None) -> dict:
    """Returns the scenario verdict records plus the detection flag.

    adapter_factory(dialect, name, faults) may substitute any adapter pair
    for the in-process engines; adapters it returns must accept mutations,
    since scenario setup runs through execute.
    """
    factory = adapter_factory or _reference_factory
    faults = FaultSet.of(scenario.fault_id) if inject else FaultSet.none()
    clean = faulty = None
    try:
        clean = factory(scenario.dialect, "reference", FaultSet.none())
        faulty = factory(scenario.dialect, f"faulty-{scenario.fault_id}", faults)
        if scenario.graph == "fixture":
            graph = fixture_graph()
            clean.load(graph)
            faulty.load(graph)
        for statement in scenario.setup:
            for adapter in (clean, faulty):
                result = adapter.execute(statement)
                if isinstance(result, EngineError):
                    raise InjectionError(
                        f"{scenario.fault_id} setup {statement!r} failed on "
                        f"{adapter.name}: {result.message}"
                    )
        records = []
        for index, text in enumerate(scenario.queries, start=1):
            verdict = verdict_for(_outcome(clean, text), _outcome(faulty, text))
            records.append({
                "round": 1,
                "index": index,
                "dialect": scenario.dialect,
                "text": text,
                "fingerprint": sorted(operator_fingerprint(text, scenario.dialect)),
                "lint": {"status": "pass"},
                "verdict": verdict.to_json(),
            })
    finally:
        for adapter in (clean, faulty):
            if adapter is not None:
                adapter.close()
    clusters = dedup_discrepancies(records)
    detected = any(scenario.trigger_op in c["fingerprint"] for c in clusters)
    discrepancies = sum(c["count"] for c in clusters)
    return {
        "fault": scenario.fault_id,
        "dialect": scenario.dialect,
        "trigger_op": scenario.trigger_op,
        "injected": inject,
        "discrepancies": discrepancies,
        "detected": detected,
        "kinds": sorted({c["kind"] for c in clusters}),
        "records": records,
        "clusters": clusters,
    }


def run_injection_suite(inject: bool = True, adapter_factory=None) -> list[dict]:
    return [run_scenario(s, inject=inject, adapter_factory=adapter_factory)
            for s in SCENARIOS]


def render_injection_table(results: list[dict]) -> str:
    """Summary table: one row per fault, aligned for terminal output."""
    header = f"{'fault':<6} {'dialect':<8} {'trigger':<10} " \
             f"{'discrepancies':<14} {'kinds':<22} result"
    lines = [header, "-" * len(header)]
    for row in results:
        status = "PASS" if row["detected"] == row["injected"] else "FAIL"
        kinds = ",".join(row["kinds"]) or "-"
        lines.append(
            f"{row['fault']:<6} {row['dialect']:<8} {row['trigger_op']:<10} "
            f"{row['discrepancies']:<14} {kinds:<22} {status}"
        )
    return "\n".join(lines)
