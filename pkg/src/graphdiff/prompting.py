"""Prompt assembly for the query-generating language model.

A prompt has three sections: a fixed instruction explaining the edge
serialization, the serialized graph data, and a request naming the dialect,
the operator menu, and five constraints. The exact template text is pinned
byte-for-byte by golden files in the test suite; change it there first.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .generate import EDGE_SERIALIZERS
from .model import LabeledPropertyGraph

DEFAULT_MAX_PROMPT_CHARS = 60_000

_NUMBER_WORDS = (
    "zero one two three four five six seven eight nine ten eleven twelve "
    "thirteen fourteen fifteen sixteen seventeen eighteen nineteen twenty"
).split()


class PromptTooLargeError(ValueError):
    """The assembled prompt exceeds the configured character budget."""


def spell_count(n: int) -> str:
    return _NUMBER_WORDS[n] if 0 <= n < len(_NUMBER_WORDS) else str(n)


@dataclass(frozen=True)
class DialectProfile:
    """Everything dialect-specific about prompting: wording and serializer."""

    dialect: str  # "cypher" | "gremlin"
    instruction: str
    operators: tuple[str, ...]
    constraints: tuple[str, ...]  # exactly five
    edge_format: str  # key into EDGE_SERIALIZERS
    queries_per_round: int = 20

    def __post_init__(self):
        if len(self.constraints) != 5:
            raise ValueError("a dialect profile carries exactly five constraints")
        if self.edge_format not in EDGE_SERIALIZERS:
            raise ValueError(f"unknown edge format {self.edge_format!r}")


@dataclass(frozen=True)
class PromptText:
    instruction: str
    graph_data: str
    request: str

    @property
    def text(self) -> str:
        return f"{self.instruction}\n\n{self.graph_data}\n\n{self.request}\n"


_CYPHER_INSTRUCTION = (
    "Instruction: Your task is to generate queries in the Graph database according "
    "to the nodes and relationships in the mentioned graph. The edges in the graph "
    "are represented as | (: node type {attribute key value pairs}) | "
    "(: relationship type {attribute key value pairs}) | "
    "(: node type {attribute key value pairs}) |. For example, "
    '| (: nt8 {p6: false, name: "u97"}) | (: et11 {p8: true}) | '
    '(: nt6 {p17: false, name: "u33"}) | Indicates that there exists a directed '
    'edge of type et11 from a node named "u97" to a node named "u33".'
)

_GREMLIN_INSTRUCTION = (
    "Instruction: Your task is to generate queries in the Graph database according "
    "to the nodes and relationships in the mentioned graph. The edges in the graph "
    "are represented as (node type {attribute key value pairs})-(relationship type "
    "{attribute key value pairs})->(node type {attribute key value pairs}). "
    'For example, (nt0 {p5: "IF",name: "u1"})-(et2 {name: "e1",p9: 69.7})->'
    '(nt0 {p3: true,name: "u88"}) Indicates that there exists a directed edge of '
    'type et2 from a node named "u1" to a node named "u88".'
)

_CYPHER_OPERATORS = (
    "MATCH", "OPTIONAL MATCH", "WHERE", "Aggregation", "FOREACH", "RETURN",
    "ORDER BY", "WITH", "UNWIND", "UNION", "UNION ALL", "collect", "predicate",
    "coalesce", "length", "type", "keys", "labels", "startNode", "endNode",
    "nodes", "relationships", "reduce", "shortestPath",
)

_GREMLIN_OPERATORS = (
    "hasLabel()", "hasId()", "has()", "hasNot()", "values()", "label()", "id()",
    "properties()", "valueMap()", "select()", "dedup()", "local()", "order().by()",
    "where()", "filter()", "match()", "eq()", "neq()", "gt()", "gte()", "inside()",
    "outside()", "group().by()", "groupCount().by()", "in()", "out()", "inE()",
    "outE()", "inV()", "outV()", "both()", "path()", "repeat().until()", "sum()",
    "max()", "min()", "mean()", "contains()", "choose()", "union()", "fold()",
)

_SHARED_CONSTRAINTS = (
    "Please make sure the queried data is the node or link mentioned earlier.",
    "Please ensure that the values in the attribute key value pairs of the "
    "constraint exist.",
    "If you want to generate a query with relationships, please pay attention to "
    "the direction of the query relationships in the generated query statement.",
    "Please ensure that the generated queries use different keywords as much as "
    "possible.",
)

_CYPHER_CONSTRAINT_5 = (
    "Please ensure that the generated query statement will not change the data of "
    "the Graph database(eg. Do not use the create operators)."
)

_GREMLIN_CONSTRAINT_5 = (
    "Please ensure that the generated query statement will not change the data of "
    "the Graph database(eg. Do not use the addV() or addE() operators)."
)


def default_profile(dialect: str) -> DialectProfile:
    if dialect == "cypher":
        return DialectProfile(
            dialect="cypher",
            instruction=_CYPHER_INSTRUCTION,
            operators=_CYPHER_OPERATORS,
            constraints=_SHARED_CONSTRAINTS + (_CYPHER_CONSTRAINT_5,),
            edge_format="piped",
        )
    if dialect == "gremlin":
        return DialectProfile(
            dialect="gremlin",
            instruction=_GREMLIN_INSTRUCTION,
            operators=_GREMLIN_OPERATORS,
            constraints=_SHARED_CONSTRAINTS + (_GREMLIN_CONSTRAINT_5,),
            edge_format="plain",
        )
    raise ValueError(f"unknown dialect {dialect!r}")


def with_queries_per_round(profile: DialectProfile, n: int) -> DialectProfile:
    return replace(profile, queries_per_round=n)


def build_prompt(g: LabeledPropertyGraph, profile: DialectProfile,
                 max_chars: int = DEFAULT_MAX_PROMPT_CHARS) -> PromptText:
    serializer = EDGE_SERIALIZERS[profile.edge_format]
    lines = serializer(g)
    graph_data = (
        "The following is the graph data in the Graph database engine, which "
        f"contains {len(g.nodes)} nodes and {len(g.edges)} edges:\n"
        + "\n".join(lines)
    )
    request = (
        "Based on the instruction and graph database, Please generate "
        f"{spell_count(profile.queries_per_round)} {profile.dialect} queries with "
        f"the different operators(eg. {', '.join(profile.operators)}) and meet "
        "the following conditions:\n"
        + "\n".join(f"{i}. {c}" for i, c in enumerate(profile.constraints, start=1))
    )
    prompt = PromptText(profile.instruction, graph_data, request)
    if len(prompt.text) > max_chars:
        raise PromptTooLargeError(
            f"prompt is {len(prompt.text)} chars, budget is {max_chars}; "
            "shrink the graph or raise max_prompt_chars"
        )
    return prompt
