"""Typed intermediate representation for the supported query subsets.

Only queries the reference engine can evaluate are representable here.
Anything outside the subset raises UnsupportedSyntax, which is a routing
signal, not a failure: such queries still run on external engine pairs, they
just cannot be checked against the reference engine.

The mutation forms (Cypher CREATE, Gremlin addV/addE/property/drop) exist for
graph loading and fault-injection scenarios only; campaign queries that
contain them never reach the parser because lint rejects them first.
"""

from __future__ import annotations

from dataclasses import dataclass

from .canonical import CanonicalValue


class UnsupportedSyntax(Exception):
    """Query is outside the reference subset; run it on external engines only."""

    def __init__(self, token: str, position: int = 0):
        super().__init__(f"unsupported syntax {token!r} at position {position}")
        self.token = token
        self.position = position


# --- expressions ---------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    value: CanonicalValue


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class PropAccess:
    var: str
    key: str


Expr = Literal | Var | PropAccess

COMPARISON_OPS = ("=", "<>", ">", "<", ">=", "<=")


@dataclass(frozen=True)
class Comparison:
    op: str
    left: Expr
    right: Expr


# --- cypher --------------------------------------------------------------------

@dataclass(frozen=True)
class NodePat:
    var: str | None
    label: str | None
    props: tuple[tuple[str, CanonicalValue], ...] = ()


@dataclass(frozen=True)
class RelPat:
    var: str | None
    label: str | None
    direction: str  # "out" | "in" | "both"
    props: tuple[tuple[str, CanonicalValue], ...] = ()


@dataclass(frozen=True)
class PathPat:
    """A linear path: n nodes joined by n-1 relationships (n is 1 or 2)."""

    nodes: tuple[NodePat, ...]
    rels: tuple[RelPat, ...] = ()


@dataclass(frozen=True)
class With:
    items: tuple[tuple[Expr, str], ...]  # (expression, alias)


@dataclass(frozen=True)
class Unwind:
    expr: Expr
    alias: str


Stage = With | Unwind


@dataclass(frozen=True)
class Count:
    expr: Expr


@dataclass(frozen=True)
class Avg:
    prop: PropAccess


@dataclass(frozen=True)
class Sum:
    prop: PropAccess


@dataclass(frozen=True)
class Collect:
    expr: Expr
    distinct: bool = False


Aggregate = Count | Avg | Sum | Collect


@dataclass(frozen=True)
class ReturnItem:
    expr: Expr | Aggregate
    alias: str | None = None


@dataclass(frozen=True)
class CypherQuery:
    patterns: tuple[PathPat, ...] = ()
    where: tuple[Comparison, ...] = ()  # AND-joined
    stages: tuple[Stage, ...] = ()
    returns: tuple[ReturnItem, ...] = ()
    creates: tuple[PathPat, ...] = ()  # load/injection form

    @property
    def is_mutation(self) -> bool:
        return bool(self.creates)


# --- gremlin ---------------------------------------------------------------------

@dataclass(frozen=True)
class Pred:
    op: str  # "eq" | "neq" | "gt" | "without"
    values: tuple[CanonicalValue, ...]


@dataclass(frozen=True)
class HasLabel:
    labels: tuple[str, ...]


@dataclass(frozen=True)
class HasKey:
    key: str


@dataclass(frozen=True)
class HasPred:
    key: str
    pred: Pred


@dataclass(frozen=True)
class CountStep:
    pass


@dataclass(frozen=True)
class ValueMapStep:
    pass


@dataclass(frozen=True)
class AddV:
    label: str


@dataclass(frozen=True)
class AddE:
    label: str


@dataclass(frozen=True)
class EndpointAnchor:
    """from()/to() of an addE chain: the node whose `key` property equals
    `value` becomes the edge endpoint."""

    end: str  # "from" | "to"
    key: str
    value: CanonicalValue


@dataclass(frozen=True)
class PropertyStep:
    key: str
    value: CanonicalValue


@dataclass(frozen=True)
class DropStep:
    pass


GremlinStep = (HasLabel | HasKey | HasPred | CountStep | ValueMapStep
               | AddV | AddE | EndpointAnchor | PropertyStep | DropStep)

_MUTATING_STEPS = (AddV, AddE, EndpointAnchor, PropertyStep, DropStep)


@dataclass(frozen=True)
class GremlinQuery:
    source: str | None  # "V" | "E" | None for bare g.addV()/g.addE() chains
    steps: tuple[GremlinStep, ...] = ()

    @property
    def is_mutation(self) -> bool:
        return any(isinstance(s, _MUTATING_STEPS) for s in self.steps)


QueryIR = CypherQuery | GremlinQuery


# --- printing -------------------------------------------------------------------

def _print_literal(v: CanonicalValue) -> str:
    if v.kind == "null":
        return "null"
    if v.kind == "bool":
        return "true" if v.value else "false"
    if v.kind == "str":
        return '"' + v.value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return repr(v.value)


def _print_props(props) -> str:
    if not props:
        return ""
    return " {" + ", ".join(f"{k}: {_print_literal(v)}" for k, v in props) + "}"


def _print_node(n: NodePat) -> str:
    label = f":{n.label}" if n.label else ""
    return f"({n.var or ''}{label}{_print_props(n.props)})"


def _print_rel(r: RelPat) -> str:
    label = f":{r.label}" if r.label else ""
    body = f"[{r.var or ''}{label}{_print_props(r.props)}]"
    if r.direction == "out":
        return f"-{body}->"
    if r.direction == "in":
        return f"<-{body}-"
    return f"-{body}-"


def _print_path(p: PathPat) -> str:
    out = [_print_node(p.nodes[0])]
    for rel, node in zip(p.rels, p.nodes[1:]):
        out.append(_print_rel(rel))
        out.append(_print_node(node))
    return "".join(out)


def _print_expr(e) -> str:
    match e:
        case Literal(value=v):
            return _print_literal(v)
        case Var(name=name):
            return name
        case PropAccess(var=var, key=key):
            return f"{var}.{key}"
        case Count(expr=x):
            return f"count({_print_expr(x)})"
        case Avg(prop=p):
            return f"avg({_print_expr(p)})"
        case Sum(prop=p):
            return f"sum({_print_expr(p)})"
        case Collect(expr=x, distinct=d):
            inner = ("distinct " if d else "") + _print_expr(x)
            return f"collect({inner})"
    raise TypeError(f"not an expression: {e!r}")


def print_ir(ir: QueryIR) -> str:
    """Render an IR back to query text; reparsing yields an equal IR."""
    if isinstance(ir, GremlinQuery):
        parts = ["g"]
        if ir.source:
            parts.append(f".{ir.source}()")
        for s in ir.steps:
            match s:
                case HasLabel(labels=ls):
                    args = ", ".join(f"'{l}'" for l in ls)
                    parts.append(f".hasLabel({args})")
                case HasKey(key=k):
                    parts.append(f".has('{k}')")
                case HasPred(key=k, pred=Pred(op="eq", values=(v,))):
                    parts.append(f".has('{k}', {_print_glit(v)})")
                case HasPred(key=k, pred=p):
                    args = ", ".join(_print_glit(v) for v in p.values)
                    parts.append(f".has('{k}', {p.op}({args}))")
                case CountStep():
                    parts.append(".count()")
                case ValueMapStep():
                    parts.append(".valueMap()")
                case AddV(label=l):
                    parts.append(f".addV('{l}')")
                case AddE(label=l):
                    parts.append(f".addE('{l}')")
                case EndpointAnchor(end=end, key=k, value=v):
                    parts.append(f".{end}(__.V().has('{k}', {_print_glit(v)}))")
                case PropertyStep(key=k, value=v):
                    parts.append(f".property('{k}', {_print_glit(v)})")
                case DropStep():
                    parts.append(".drop()")
        return "".join(parts)

    clauses = []
    if ir.patterns:
        clauses.append("MATCH " + ", ".join(_print_path(p) for p in ir.patterns))
    if ir.where:
        conds = " AND ".join(
            f"{_print_expr(c.left)} {c.op} {_print_expr(c.right)}" for c in ir.where
        )
        clauses.append(f"WHERE {conds}")
    for stage in ir.stages:
        if isinstance(stage, With):
            items = ", ".join(f"{_print_expr(e)} AS {a}" for e, a in stage.items)
            clauses.append(f"WITH {items}")
        else:
            clauses.append(f"UNWIND {_print_expr(stage.expr)} AS {stage.alias}")
    if ir.returns:
        items = ", ".join(
            _print_expr(r.expr) + (f" AS {r.alias}" if r.alias else "")
            for r in ir.returns
        )
        clauses.append(f"RETURN {items}")
    if ir.creates:
        clauses.append("CREATE " + ", ".join(_print_path(p) for p in ir.creates))
    return " ".join(clauses)


def _print_glit(v: CanonicalValue) -> str:
    if v.kind == "str":
        return "'" + v.value.replace("\\", "\\\\").replace("'", "\\'") + "'"
    if v.kind == "bool":
        return "true" if v.value else "false"
    if v.kind == "null":
        return "null"
    return repr(v.value)
