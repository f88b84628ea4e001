"""Labeled property graph model shared by every other module.

Nodes and edges carry a label and an ordered map of typed properties. The
property named "name" acts as the element's identity when results from
different engines are compared, so the model refuses to build graphs where
it is missing or duplicated.

Example:
    >>> g = fixture_graph()
    >>> [n.label for n in g.nodes]
    ['nt0', 'nt0', 'nt1', 'nt1']
    >>> g.edges[0].properties["name"].value
    'e1'
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

PROPERTY_KINDS = ("int", "float", "str", "bool")

NAME_KEY = "name"


class GraphValidationError(ValueError):
    """A graph or property value violates a structural invariant."""


@dataclass(frozen=True)
class PropertyValue:
    """One typed property value. Exactly one of the four kinds.

    Python's bool subclasses int, so untyped dicts would silently conflate
    `True` with `1`; the explicit kind tag keeps them distinct end to end.
    """

    kind: str
    value: int | float | str | bool

    def __post_init__(self):
        if self.kind not in PROPERTY_KINDS:
            raise GraphValidationError(f"unknown property kind {self.kind!r}")
        v = self.value
        ok = {
            "int": lambda: isinstance(v, int) and not isinstance(v, bool),
            "float": lambda: isinstance(v, float),
            "str": lambda: isinstance(v, str),
            "bool": lambda: isinstance(v, bool),
        }[self.kind]()
        if not ok:
            raise GraphValidationError(
                f"value {v!r} does not match property kind {self.kind!r}"
            )
        if self.kind == "float" and not math.isfinite(v):
            raise GraphValidationError("float properties must be finite")

    @staticmethod
    def of(value: int | float | str | bool) -> "PropertyValue":
        """Wrap a plain Python value, mapping its type to a kind."""
        if isinstance(value, bool):
            return PropertyValue("bool", value)
        if isinstance(value, int):
            return PropertyValue("int", value)
        if isinstance(value, float):
            return PropertyValue("float", value)
        if isinstance(value, str):
            return PropertyValue("str", value)
        raise GraphValidationError(f"unsupported property type {type(value).__name__}")


def pv_int(v: int) -> PropertyValue:
    return PropertyValue("int", v)


def pv_float(v: float) -> PropertyValue:
    return PropertyValue("float", v)


def pv_str(v: str) -> PropertyValue:
    return PropertyValue("str", v)


def pv_bool(v: bool) -> PropertyValue:
    return PropertyValue("bool", v)


@dataclass(frozen=True)
class GraphSchema:
    """The label and property-key vocabulary a graph is generated from."""

    node_labels: tuple[str, ...]
    edge_labels: tuple[str, ...]
    property_keys: tuple[str, ...]  # always includes "name"

    def __post_init__(self):
        if NAME_KEY not in self.property_keys:
            raise GraphValidationError('schema property keys must include "name"')
        for group in (self.node_labels, self.edge_labels, self.property_keys):
            if len(set(group)) != len(group):
                raise GraphValidationError("schema entries must be unique")

    @property
    def extra_property_keys(self) -> tuple[str, ...]:
        return tuple(k for k in self.property_keys if k != NAME_KEY)


@dataclass
class Node:
    id: int
    label: str
    properties: dict[str, PropertyValue]

    @property
    def name(self) -> str:
        return str(self.properties[NAME_KEY].value)


@dataclass
class Edge:
    id: int
    label: str
    src: int  # node id of the source endpoint
    dst: int  # node id of the destination endpoint
    properties: dict[str, PropertyValue]

    @property
    def name(self) -> str:
        return str(self.properties[NAME_KEY].value)


@dataclass
class LabeledPropertyGraph:
    nodes: list[Node] = field(default_factory=list)
    edges: list[Edge] = field(default_factory=list)

    def node_by_id(self, node_id: int) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)


def validate_graph(g: LabeledPropertyGraph) -> None:
    """Check referential integrity, no self-loops, and name uniqueness.

    Raises GraphValidationError with the first violation found.
    """
    node_ids = set()
    names = set()
    for n in g.nodes:
        if n.id in node_ids:
            raise GraphValidationError(f"duplicate node id {n.id}")
        node_ids.add(n.id)
        _check_properties(n.properties, f"node {n.id}", names)
    edge_ids = set()
    for e in g.edges:
        if e.id in edge_ids:
            raise GraphValidationError(f"duplicate edge id {e.id}")
        edge_ids.add(e.id)
        if e.src not in node_ids or e.dst not in node_ids:
            raise GraphValidationError(f"edge {e.id} references a missing node")
        if e.src == e.dst:
            raise GraphValidationError(f"edge {e.id} is a self-loop")
        _check_properties(e.properties, f"edge {e.id}", names)


def _check_properties(props: dict[str, PropertyValue], what: str, names: set) -> None:
    if NAME_KEY not in props:
        raise GraphValidationError(f'{what} has no "name" property')
    name = props[NAME_KEY]
    if name.kind != "str":
        raise GraphValidationError(f"{what} name must be a string")
    if name.value in names:
        raise GraphValidationError(f"{what} reuses name {name.value!r}")
    names.add(name.value)
    for key, value in props.items():
        if not isinstance(value, PropertyValue):
            raise GraphValidationError(f"{what} property {key!r} is untyped")


def _named(props: dict[str, PropertyValue | int | float | str | bool], name: str,
           name_first: bool = False) -> dict[str, PropertyValue]:
    typed = {k: v if isinstance(v, PropertyValue) else PropertyValue.of(v)
             for k, v in props.items()}
    if name_first:
        return {NAME_KEY: pv_str(name), **typed}
    return {**typed, NAME_KEY: pv_str(name)}


def fixture_graph() -> LabeledPropertyGraph:
    """The four-node fixture graph G0 used throughout the test suite.

    Small enough to evaluate queries by hand, rich enough to cover every
    property kind and both edge labels between distinct node labels.
    """
    g = LabeledPropertyGraph(
        nodes=[
            Node(1, "nt0", _named({"p2": pv_bool(True)}, "u1")),
            Node(2, "nt0", _named({"p2": pv_bool(False)}, "u2")),
            Node(3, "nt1", _named({"p8": pv_float(2.0)}, "u3")),
            Node(4, "nt1", _named({"p2": pv_str("GhR")}, "u4")),
        ],
        edges=[
            Edge(1, "et0", 1, 2, _named({"p2": pv_str("GhR")}, "e1")),
            Edge(2, "et0", 2, 3, _named({"p2": pv_bool(True)}, "e2")),
            Edge(3, "et1", 3, 1, _named({"p2": pv_bool(False)}, "e3")),
        ],
    )
    validate_graph(g)
    return g
