"""Built-in read-only queries covering the reference engine's subset.

Every query here parses into the IR without UnsupportedSyntax and touches
only the default schema vocabulary (labels nt0..nt3/et0..et3, keys name and
p0..p9), so the corpus can run against any generated graph. The engine
cross-validation suite executes it on batches of small random graphs and
checks the reference engine against an independent brute-force evaluator.
"""

from __future__ import annotations

CYPHER_CORPUS: tuple[str, ...] = (
    "MATCH (n) RETURN n",
    "MATCH (n:nt0) RETURN n",
    "MATCH (n:nt0) RETURN count(n)",
    "MATCH (n:nt1) RETURN n.name, n.p8",
    "MATCH (n:nt2) RETURN n.name, n.p2, n.p9",
    "MATCH (n {p2: true}) RETURN n.name",
    "MATCH (n)-[r]->(m) RETURN n.name, m.name",
    "MATCH (n)-[r:et0]->(m) RETURN count(r)",
    "MATCH (n)<-[r:et1]-(m) RETURN n.name, m.name",
    "MATCH (n)-[r]-(m) RETURN count(r)",
    "MATCH ()-[r]->() RETURN count(r)",
    "MATCH ()-[r {p2: true}]->() RETURN count(r)",
    "MATCH (n:nt0)-[:et0]->(m) RETURN n, m",
    "MATCH (n) WHERE n.p2 = true RETURN n.name",
    "MATCH (n) WHERE n.p2 = false RETURN n",
    "MATCH (n) WHERE n.p9 > 10.5 RETURN n.name, n.p9",
    "MATCH (n) WHERE n.p0 >= 0 AND n.p0 <= 100 RETURN count(n)",
    "MATCH (n) WHERE n.p0 < 50 RETURN n.p0",
    'MATCH (n) WHERE n.name <> "u1" RETURN count(n)',
    "MATCH (n)-[r]->(m) WHERE n.p2 = m.p2 RETURN n.name, m.name",
    "MATCH (n)-[r]->(m) WHERE n = m RETURN count(n)",
    "MATCH (n) RETURN avg(n.p9)",
    "MATCH (n) RETURN sum(n.p0)",
    "MATCH (n:nt3) RETURN count(n), avg(n.p9)",
    "MATCH (n:nt1)-[r]-() RETURN n.name, sum(r.p8)",
    "MATCH (n) RETURN collect(n.name)",
    "MATCH (n) RETURN collect(distinct n.p2)",
    "MATCH (n) RETURN count(n.p3)",
    "MATCH (n:nt0)-[:et0]->(m) RETURN n, collect(m)",
    "MATCH (a:nt1)-[r]-(b) RETURN a.name, count(r)",
    "MATCH (n) WITH n AS m RETURN count(m)",
    "MATCH (n) WITH n.p9 AS score RETURN score",
    "MATCH (n) UNWIND n.p2 AS v RETURN v",
    "MATCH (n)-[r]->(m) UNWIND r.p1 AS v RETURN v, m.name",
    "MATCH (n:nt0), (m:nt1) RETURN count(n)",
    "MATCH (n)-[:et0]->(m), (m)-[:et1]->(k) RETURN n.name, k.name",
    "MATCH (n)-[:et0]->(), ()-[:et1]->(n) RETURN count(n)",
)

GREMLIN_CORPUS: tuple[str, ...] = (
    "g.V()",
    "g.V().count()",
    "g.E().count()",
    "g.V().hasLabel('nt0').count()",
    "g.V().hasLabel('nt0', 'nt1').count()",
    "g.E().hasLabel('et0').count()",
    "g.V().hasLabel('nt1').valueMap()",
    "g.E().valueMap()",
    "g.V().has('p0')",
    "g.V().has('p2', true).count()",
    "g.E().has('p2', true).count()",
    "g.V().has('p2', eq(false)).valueMap()",
    "g.V().has('name', 'u1').valueMap()",
    "g.V().has('p9', gt(10.5)).count()",
    "g.V().has('p2', neq('false')).valueMap()",
    "g.E().has('p2', without('GhR')).count()",
    "g.V().has('p5', without('a', 'b')).count()",
    "g.V().hasLabel('nt2').has('p2', true).valueMap()",
)


def corpus(dialect: str) -> tuple[str, ...]:
    if dialect == "cypher":
        return CYPHER_CORPUS
    if dialect == "gremlin":
        return GREMLIN_CORPUS
    raise ValueError(f"unknown dialect {dialect!r}")
