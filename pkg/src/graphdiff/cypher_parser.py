"""Recursive-descent parser for the supported Cypher subset.

Subset: one MATCH with up to two comma-separated linear paths of at most two
nodes, an AND-only WHERE over comparisons, WITH/UNWIND pass-through stages,
and RETURN items that are expressions or count/avg/sum/collect aggregates.
CREATE appears only in the load/injection form. Everything else raises
UnsupportedSyntax with the offending token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .canonical import NULL, CanonicalValue, cv_bool, cv_float, cv_int, cv_str
from .ir import (
    Avg, Collect, Comparison, Count, CypherQuery, Literal, NodePat, PathPat,
    PropAccess, RelPat, ReturnItem, Sum, Unwind, UnsupportedSyntax, Var, With,
)

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>\d+\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>'(?:\\.|[^'\\])*'|"(?:\\.|[^"\\])*")
  | (?P<punct><>|<=|>=|[()\[\]{},:.\-<>=*;+/%|])
""", re.VERBOSE)


@dataclass(frozen=True)
class Tok:
    kind: str  # "ident" | "number" | "string" | "punct" | "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[Tok]:
    toks = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise UnsupportedSyntax(text[i], i)
        i = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        toks.append(Tok(kind, m.group(0), m.start()))
    toks.append(Tok("end", "", len(text)))
    return toks


_CLAUSE_KEYWORDS = {
    "MATCH", "WHERE", "WITH", "UNWIND", "RETURN", "CREATE", "OPTIONAL",
    "ORDER", "UNION", "FOREACH", "MERGE", "SET", "DELETE", "DETACH", "REMOVE",
    "SKIP", "LIMIT", "CALL", "CASE",
}

_AGG_FUNCS = {"COUNT", "AVG", "SUM", "COLLECT"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    # --- token helpers ---
    def peek(self, offset: int = 0) -> Tok:
        return self.toks[min(self.i + offset, len(self.toks) - 1)]

    def next(self) -> Tok:
        t = self.toks[self.i]
        if t.kind != "end":
            self.i += 1
        return t

    def at_punct(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "punct" and t.text == text

    def eat_punct(self, text: str) -> Tok:
        if not self.at_punct(text):
            t = self.peek()
            raise UnsupportedSyntax(t.text or "<end>", t.pos)
        return self.next()

    def at_keyword(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "ident" and t.text.upper() == word

    def eat_keyword(self, word: str) -> Tok:
        if not self.at_keyword(word):
            t = self.peek()
            raise UnsupportedSyntax(t.text or "<end>", t.pos)
        return self.next()

    def unsupported(self) -> UnsupportedSyntax:
        t = self.peek()
        return UnsupportedSyntax(t.text or "<end>", t.pos)

    # --- grammar ---
    def parse(self) -> CypherQuery:
        patterns: tuple = ()
        creates: tuple = ()
        where: tuple = ()
        stages: list = []
        returns: tuple = ()
        if self.at_keyword("MATCH"):
            self.next()
            patterns = self.parse_patterns(limit=2)
        if self.at_keyword("WHERE"):
            self.next()
            where = self.parse_where()
        while self.at_keyword("WITH") or self.at_keyword("UNWIND"):
            stages.append(self.parse_stage())
        if self.at_keyword("RETURN"):
            self.next()
            returns = self.parse_returns()
        elif self.at_keyword("CREATE"):
            self.next()
            creates = self.parse_patterns(limit=2)
        elif not patterns and not stages:
            raise self.unsupported()
        if self.peek().kind != "end":
            raise self.unsupported()
        if not returns and not creates:
            raise self.unsupported()
        return CypherQuery(
            patterns=patterns,
            where=where,
            stages=tuple(stages),
            returns=returns,
            creates=creates,
        )

    def parse_patterns(self, limit: int) -> tuple[PathPat, ...]:
        patterns = [self.parse_path()]
        while self.at_punct(","):
            self.next()
            patterns.append(self.parse_path())
        if len(patterns) > limit:
            raise UnsupportedSyntax(f"{len(patterns)} comma-separated patterns",
                                    self.peek().pos)
        return tuple(patterns)

    def parse_path(self) -> PathPat:
        if self.peek().kind == "ident" and self.peek(1).kind == "punct" \
                and self.peek(1).text == "=":
            # named path / function pattern: report what follows the '='
            culprit = self.peek(2)
            raise UnsupportedSyntax(culprit.text or "=", culprit.pos)
        nodes = [self.parse_node()]
        rels = []
        while self.at_punct("-") or self.at_punct("<"):
            rels.append(self.parse_rel())
            nodes.append(self.parse_node())
        if len(nodes) > 2:
            raise UnsupportedSyntax(f"path of {len(nodes)} nodes", self.peek().pos)
        return PathPat(nodes=tuple(nodes), rels=tuple(rels))

    def parse_node(self) -> NodePat:
        self.eat_punct("(")
        var = None
        label = None
        props: tuple = ()
        if self.peek().kind == "ident":
            word = self.peek().text
            if word.upper() in _CLAUSE_KEYWORDS:
                raise self.unsupported()
            var = self.next().text
        if self.at_punct(":"):
            self.next()
            label = self.next_label()
        if self.at_punct("{"):
            props = self.parse_propmap()
        self.eat_punct(")")
        return NodePat(var=var, label=label, props=props)

    def next_label(self) -> str:
        t = self.next()
        if t.kind != "ident":
            raise UnsupportedSyntax(t.text or "<end>", t.pos)
        return t.text

    def parse_rel(self) -> RelPat:
        incoming = False
        if self.at_punct("<"):
            self.next()
            incoming = True
        self.eat_punct("-")
        var = None
        label = None
        props: tuple = ()
        if self.at_punct("["):
            self.next()
            if self.peek().kind == "ident":
                var = self.next().text
            if self.at_punct(":"):
                self.next()
                label = self.next_label()
                if self.at_punct("|"):  # alternation is out of subset
                    raise self.unsupported()
            if self.at_punct("*"):  # variable-length paths are out of subset
                raise self.unsupported()
            if self.at_punct("{"):
                props = self.parse_propmap()
            self.eat_punct("]")
        self.eat_punct("-")
        outgoing = False
        if self.at_punct(">"):
            self.next()
            outgoing = True
        if incoming and outgoing:
            raise UnsupportedSyntax("<-...->", self.peek().pos)
        direction = "in" if incoming else ("out" if outgoing else "both")
        return RelPat(var=var, label=label, direction=direction, props=props)

    def parse_propmap(self) -> tuple[tuple[str, CanonicalValue], ...]:
        self.eat_punct("{")
        pairs = []
        while not self.at_punct("}"):
            key = self.next()
            if key.kind != "ident":
                raise UnsupportedSyntax(key.text or "<end>", key.pos)
            self.eat_punct(":")
            pairs.append((key.text, self.parse_literal()))
            if self.at_punct(","):
                self.next()
        self.eat_punct("}")
        return tuple(pairs)

    def parse_literal(self) -> CanonicalValue:
        t = self.next()
        if t.kind == "number":
            txt = t.text
            if "." in txt or "e" in txt or "E" in txt:
                return cv_float(float(txt))
            return cv_int(int(txt))
        if t.kind == "string":
            return cv_str(_unquote(t.text))
        if t.kind == "ident":
            low = t.text.lower()
            if low == "true":
                return cv_bool(True)
            if low == "false":
                return cv_bool(False)
            if low == "null":
                return NULL
        raise UnsupportedSyntax(t.text or "<end>", t.pos)

    def parse_where(self) -> tuple[Comparison, ...]:
        conds = [self.parse_comparison()]
        while self.at_keyword("AND"):
            self.next()
            conds.append(self.parse_comparison())
        return tuple(conds)

    def parse_comparison(self) -> Comparison:
        if self.at_keyword("NOT"):
            raise self.unsupported()
        left = self.parse_operand()
        t = self.next()
        op = t.text
        if t.kind == "punct" and op in ("<", ">") and self.at_punct("="):
            # tokenized separately only if whitespace intervened
            op += self.next().text
        if op not in ("=", "<>", ">", "<", ">=", "<="):
            raise UnsupportedSyntax(op or "<end>", t.pos)
        right = self.parse_operand()
        return Comparison(op=op, left=left, right=right)

    def parse_operand(self):
        t = self.peek()
        if t.kind == "ident" and t.text.upper() in ("OR", "NOT", "XOR"):
            raise self.unsupported()
        if t.kind == "ident" and t.text.lower() not in ("true", "false", "null"):
            if self.peek(1).kind == "punct" and self.peek(1).text == "(":
                raise UnsupportedSyntax(t.text, t.pos)  # function call
            name = self.next().text
            if self.at_punct("."):
                self.next()
                key = self.next()
                if key.kind != "ident":
                    raise UnsupportedSyntax(key.text or "<end>", key.pos)
                return PropAccess(var=name, key=key.text)
            return Var(name=name)
        return Literal(value=self.parse_literal())

    def parse_stage(self):
        if self.at_keyword("UNWIND"):
            self.next()
            expr = self.parse_operand()
            self.eat_keyword("AS")
            alias = self.next()
            if alias.kind != "ident":
                raise UnsupportedSyntax(alias.text or "<end>", alias.pos)
            return Unwind(expr=expr, alias=alias.text)
        self.eat_keyword("WITH")
        items = []
        while True:
            if self.peek().kind == "ident" and self.peek().text.upper() in _AGG_FUNCS \
                    and self.peek(1).text == "(":
                raise self.unsupported()  # aggregating WITH is out of subset
            expr = self.parse_operand()
            if self.at_keyword("AS"):
                self.next()
                alias_tok = self.next()
                if alias_tok.kind != "ident":
                    raise UnsupportedSyntax(alias_tok.text or "<end>", alias_tok.pos)
                alias = alias_tok.text
            elif isinstance(expr, Var):
                alias = expr.name
            else:
                raise self.unsupported()  # non-variable items need an alias
            items.append((expr, alias))
            if self.at_punct(","):
                self.next()
                continue
            break
        return With(items=tuple(items))

    def parse_returns(self) -> tuple[ReturnItem, ...]:
        if self.at_keyword("DISTINCT"):
            raise self.unsupported()
        if self.at_punct("*"):
            raise self.unsupported()
        items = [self.parse_return_item()]
        while self.at_punct(","):
            self.next()
            items.append(self.parse_return_item())
        return tuple(items)

    def parse_return_item(self) -> ReturnItem:
        expr = self.parse_return_expr()
        alias = None
        if self.at_keyword("AS"):
            self.next()
            t = self.next()
            if t.kind != "ident":
                raise UnsupportedSyntax(t.text or "<end>", t.pos)
            alias = t.text
        return ReturnItem(expr=expr, alias=alias)

    def parse_return_expr(self):
        t = self.peek()
        if t.kind == "ident" and self.peek(1).text == "(" \
                and self.peek(1).kind == "punct":
            func = t.text.upper()
            if func not in _AGG_FUNCS:
                raise UnsupportedSyntax(t.text, t.pos)
            self.next()
            self.eat_punct("(")
            distinct = False
            if self.at_keyword("DISTINCT"):
                if func != "COLLECT":
                    raise self.unsupported()
                self.next()
                distinct = True
            if self.at_punct("*"):
                raise self.unsupported()
            inner = self.parse_operand()
            self.eat_punct(")")
            if func == "COUNT":
                return Count(expr=inner)
            if func == "COLLECT":
                return Collect(expr=inner, distinct=distinct)
            if not isinstance(inner, PropAccess):
                raise UnsupportedSyntax(f"{func.lower()} over non-property", t.pos)
            return Avg(prop=inner) if func == "AVG" else Sum(prop=inner)
        return self.parse_operand()


def _unquote(text: str) -> str:
    body = text[1:-1]
    return re.sub(r"\\(.)", r"\1", body)


def parse_cypher_subset(text: str) -> CypherQuery:
    return _Parser(text).parse()
