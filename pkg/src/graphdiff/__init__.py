"""Differential testing for graph database engines.

Generate a random labeled property graph, prompt a language model for query
batches over it, execute each query on two engines, normalize both results
into canonical records, and compare them at the level of meaning. Wrong
results surface as Discrepancy verdicts; everything that prevents a fair
comparison is Incomparable, never a false alarm.
"""

from .adapters import (
    BridgeAdapter, Capabilities, EngineAdapter, EngineError, RawResult,
    ReferenceAdapter, Rows, Timeout, make_adapter,
)
from .campaign import (
    CampaignConfig, CampaignError, load_config, render_digest, run_campaign,
    strip_timing,
)
from .canonical import NULL, CanonicalValue, Record, RecordSet
from .compare import (
    Discrepancy, Equivalent, Incomparable, Verdict, compare_results,
    values_equal, verdict_for,
)
from .engine import FaultSet, GraphStore, execute_ir
from .fingerprint import operator_fingerprint
from .generate import (
    GenParams, generate_graph, generate_schema, load_graph, save_graph,
)
from .inject import run_injection_suite
from .ir import UnsupportedSyntax
from .lint import LintVerdict, lint_query
from .model import (
    Edge, GraphSchema, LabeledPropertyGraph, Node, PropertyValue,
    fixture_graph, validate_graph,
)
from .normalize import NormalizationError, normalize_result
from .prompting import DialectProfile, build_prompt, default_profile

__version__ = "0.1.0"

__all__ = [
    "BridgeAdapter", "CampaignConfig", "CampaignError", "CanonicalValue",
    "Capabilities", "DialectProfile", "Discrepancy", "Edge", "EngineAdapter",
    "EngineError", "Equivalent", "FaultSet", "GenParams", "GraphSchema",
    "GraphStore", "Incomparable", "LabeledPropertyGraph", "LintVerdict",
    "NULL", "NormalizationError", "Node", "PropertyValue", "RawResult",
    "Record", "RecordSet", "ReferenceAdapter", "Rows", "Timeout",
    "UnsupportedSyntax", "Verdict", "build_prompt", "compare_results",
    "default_profile", "execute_ir", "fixture_graph", "generate_graph",
    "generate_schema", "lint_query", "load_config", "load_graph",
    "make_adapter", "normalize_result", "operator_fingerprint",
    "render_digest", "run_campaign", "run_injection_suite", "save_graph",
    "strip_timing", "validate_graph", "values_equal", "verdict_for",
]
