"""Parser for the supported Gremlin-Groovy subset.

Subset: a `g.V()` / `g.E()` source followed by hasLabel/has/count/valueMap
steps with eq/neq/gt/without predicates, plus the mutation chains used by
graph loading and fault injection (`g.addV(..).property(..)`,
`g.addE(..).from(__.V().has(..)).to(..)`, `g.V()...drop()`). A trailing
`.iterate()` is accepted and ignored. Everything else is UnsupportedSyntax.
"""

from __future__ import annotations

import re

from .canonical import NULL, CanonicalValue, cv_bool, cv_float, cv_int, cv_str
from .ir import (
    AddE, AddV, CountStep, DropStep, EndpointAnchor, GremlinQuery, HasKey,
    HasLabel, HasPred, Pred, PropertyStep, UnsupportedSyntax, ValueMapStep,
)

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>-?\d+\.\d+(?:[eE][+-]?\d+)?|-?\d+[eE][+-]?\d+|-?\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>'(?:\\.|[^'\\])*'|"(?:\\.|[^"\\])*")
  | (?P<punct>[().,])
""", re.VERBOSE)

_PRED_NAMES = ("eq", "neq", "gt", "without")


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.toks = []
        i = 0
        while i < len(text):
            m = _TOKEN_RE.match(text, i)
            if not m:
                raise UnsupportedSyntax(text[i], i)
            i = m.end()
            if m.lastgroup != "ws":
                self.toks.append((m.lastgroup, m.group(0), m.start()))
        self.toks.append(("end", "", len(text)))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        if t[0] != "end":
            self.i += 1
        return t

    def eat(self, kind: str, text: str | None = None):
        k, v, pos = self.peek()
        if k != kind or (text is not None and v != text):
            raise UnsupportedSyntax(v or "<end>", pos)
        return self.next()


def _literal(lex: _Lexer) -> CanonicalValue:
    kind, text, pos = lex.next()
    if kind == "number":
        if "." in text or "e" in text or "E" in text:
            return cv_float(float(text))
        return cv_int(int(text))
    if kind == "string":
        return cv_str(re.sub(r"\\(.)", r"\1", text[1:-1]))
    if kind == "ident":
        if text == "true":
            return cv_bool(True)
        if text == "false":
            return cv_bool(False)
        if text == "null":
            return NULL
    raise UnsupportedSyntax(text or "<end>", pos)


def _pred_or_literal(lex: _Lexer) -> Pred:
    kind, text, pos = lex.peek()
    if kind == "ident" and lex.toks[lex.i + 1][1] == "(":
        if text not in _PRED_NAMES:
            raise UnsupportedSyntax(text, pos)
        lex.next()
        lex.eat("punct", "(")
        values = [_literal(lex)]
        while lex.peek()[1] == ",":
            lex.next()
            values.append(_literal(lex))
        lex.eat("punct", ")")
        if text != "without" and len(values) != 1:
            raise UnsupportedSyntax(f"{text} with {len(values)} arguments", pos)
        return Pred(op=text, values=tuple(values))
    return Pred(op="eq", values=(_literal(lex),))


def _anchor(lex: _Lexer, end: str) -> EndpointAnchor:
    # __.V().has('key', literal) or V().has('key', literal)
    kind, text, pos = lex.peek()
    if kind == "ident" and text == "__":
        lex.next()
        lex.eat("punct", ".")
    lex.eat("ident", "V")
    lex.eat("punct", "(")
    lex.eat("punct", ")")
    lex.eat("punct", ".")
    lex.eat("ident", "has")
    lex.eat("punct", "(")
    key = _literal(lex)
    lex.eat("punct", ",")
    value = _literal(lex)
    lex.eat("punct", ")")
    if key.kind != "str":
        raise UnsupportedSyntax("non-string property key", pos)
    return EndpointAnchor(end=end, key=key.value, value=value)


def parse_gremlin_subset(text: str) -> GremlinQuery:
    lex = _Lexer(text)
    lex.eat("ident", "g")
    lex.eat("punct", ".")
    source = None
    steps = []
    first = lex.peek()
    if first[1] in ("V", "E"):
        lex.next()
        lex.eat("punct", "(")
        if lex.peek()[1] != ")":
            raise UnsupportedSyntax(lex.peek()[1], lex.peek()[2])  # V(id...) lookups
        lex.eat("punct", ")")
        source = first[1]
    elif first[1] not in ("addV", "addE"):
        raise UnsupportedSyntax(first[1] or "<end>", first[2])

    while True:
        kind, text_, pos = lex.peek()
        if kind == "end":
            break
        if source is not None or steps:
            lex.eat("punct", ".")
        kind, name, pos = lex.next()
        if kind != "ident":
            raise UnsupportedSyntax(name or "<end>", pos)
        if name == "iterate":
            lex.eat("punct", "(")
            lex.eat("punct", ")")
            if lex.peek()[0] != "end":
                raise UnsupportedSyntax(lex.peek()[1], lex.peek()[2])
            break
        steps.append(_step(lex, name, pos))
    return GremlinQuery(source=source, steps=tuple(steps))


def _step(lex: _Lexer, name: str, pos: int):
    lex.eat("punct", "(")
    if name == "hasLabel":
        labels = [_require_str(_literal(lex), pos)]
        while lex.peek()[1] == ",":
            lex.next()
            labels.append(_require_str(_literal(lex), pos))
        lex.eat("punct", ")")
        return HasLabel(labels=tuple(labels))
    if name == "has":
        key = _require_str(_literal(lex), pos)
        if lex.peek()[1] == ")":
            lex.next()
            return HasKey(key=key)
        lex.eat("punct", ",")
        pred = _pred_or_literal(lex)
        lex.eat("punct", ")")
        return HasPred(key=key, pred=pred)
    if name == "count":
        lex.eat("punct", ")")
        return CountStep()
    if name == "valueMap":
        lex.eat("punct", ")")
        return ValueMapStep()
    if name == "addV":
        label = _require_str(_literal(lex), pos)
        lex.eat("punct", ")")
        return AddV(label=label)
    if name == "addE":
        label = _require_str(_literal(lex), pos)
        lex.eat("punct", ")")
        return AddE(label=label)
    if name in ("from", "to"):
        anchor = _anchor(lex, name)
        lex.eat("punct", ")")
        return anchor
    if name == "property":
        key = _require_str(_literal(lex), pos)
        lex.eat("punct", ",")
        value = _literal(lex)
        lex.eat("punct", ")")
        return PropertyStep(key=key, value=value)
    if name == "drop":
        lex.eat("punct", ")")
        return DropStep()
    raise UnsupportedSyntax(name, pos)


def _require_str(v: CanonicalValue, pos: int) -> str:
    if v.kind != "str":
        raise UnsupportedSyntax(f"expected string, got {v.kind}", pos)
    return v.value
