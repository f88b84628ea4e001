"""Pre-execution query lint: reject nondeterministic and mutating queries.

Matching is token-based on a copy of the query with string literals masked
out, so `RETURN "DELETE ME"` passes while `DELETE n` does not. Cypher keywords
match case-insensitively as whole words; Gremlin steps match case-sensitively
and must be followed by an opening parenthesis where the step is a call.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


@dataclass(frozen=True)
class DenyLists:
    nondeterministic: tuple[str, ...]
    mutating: tuple[str, ...]


# A trailing "(" in a token means "step call": the name must be invoked.
DEFAULT_DENY = {
    "cypher": DenyLists(
        nondeterministic=("SKIP", "LIMIT", "rand"),
        mutating=("CREATE", "MERGE", "SET", "DELETE", "DETACH", "REMOVE",
                  "DROP", "LOAD", "FOREACH"),
    ),
    "gremlin": DenyLists(
        nondeterministic=("sample(", "coin(", "shuffle"),
        mutating=("addV(", "addE(", "property(", "drop(", "mergeV(", "mergeE("),
    ),
}


@dataclass(frozen=True)
class LintVerdict:
    status: str  # "pass" | "nondeterministic" | "mutating" | "unparseable"
    token: str | None = None  # the deny-list token that fired
    reason: str | None = None  # for unparseable

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def mask_strings(text: str) -> str | None:
    """Replace string literal contents with spaces; None if unterminated."""
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c in ("'", '"'):
            out.append(c)
            i += 1
            while i < len(text) and text[i] != c:
                if text[i] == "\\" and i + 1 < len(text):
                    out.append("  ")
                    i += 2
                    continue
                out.append(" ")
                i += 1
            if i >= len(text):
                return None
            out.append(c)
            i += 1
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _token_pattern(token: str, dialect: str) -> re.Pattern:
    if token.endswith("("):
        return re.compile(r"\b" + re.escape(token[:-1]) + r"\s*\(")
    flags = re.IGNORECASE if dialect == "cypher" else 0
    return re.compile(r"\b" + re.escape(token) + r"\b", flags)


def lint_query(text: str, dialect: str,
               deny: dict[str, DenyLists] | None = None) -> LintVerdict:
    """Classify a query; the earliest deny-token occurrence in the text wins."""
    lists = (deny or DEFAULT_DENY).get(dialect)
    if lists is None:
        raise ValueError(f"unknown dialect {dialect!r}")
    masked = mask_strings(text)
    if masked is None:
        return LintVerdict("unparseable", reason="unterminated string literal")
    if ";" in masked:
        return LintVerdict("unparseable", reason="multiple statements")
    hits: list[tuple[int, str, str]] = []
    for status, tokens in (("nondeterministic", lists.nondeterministic),
                           ("mutating", lists.mutating)):
        for token in tokens:
            m = _token_pattern(token, dialect).search(masked)
            if m:
                hits.append((m.start(), status, token.rstrip("(")))
    if not hits:
        return LintVerdict("pass")
    pos, status, token = min(hits)
    return LintVerdict(status, token=token)
