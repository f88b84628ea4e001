"""Campaign orchestration: one graph, many rounds, two engines, one report.

A campaign fixes a generated graph, asks the query generator for a batch of
queries each round with the same prompt, and pushes every query through the
pipeline: fingerprint, lint, execute on both engines, normalize, compare.
Every query leaves a record regardless of how far it got, so the report is
an audit trail, not just a score.

The report is plain JSON with sorted keys. All wall-clock data lives under
the top-level "timing" key and per-execution "latency_ms" keys and nowhere
else; strip_timing() removes exactly those, and what remains is a pure
function of the config, the graph, and the generator fixture. Replaying a
recorded campaign therefore yields a byte-identical stripped report, which
is how report integrity is tested.

Campaign state on disk, all under the configured output directory:
  graph.json      the graph both engines loaded
  progress.jsonl  one line per finished round, for --resume
  report.json     the full report
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field

from .adapters import (
    AdapterError, EngineAdapter, EngineError, Rows, Timeout, make_adapter,
)
from .compare import (
    ABS_FLOOR, REL_TOL, Outcome, is_ordered_query, verdict_for,
)
from .fingerprint import operator_fingerprint
from .generate import (
    GenParams, generate_graph, generate_schema, graph_to_json, load_graph,
)
from .lint import DEFAULT_DENY, DenyLists, lint_query
from .model import LabeledPropertyGraph
from .normalize import NormalizationError, normalize_result
from .prompting import build_prompt, default_profile, with_queries_per_round
from .querygen import (
    GenerationError, GenerationRequest, RemoteGenerator, ReplayGenerator,
    TransportError, parse_generation_response,
)

SCHEMA_VERSION = 1


class CampaignError(Exception):
    """Configuration or orchestration failure; the campaign cannot proceed."""


@dataclass
class CampaignConfig:
    seed: int = 0
    dialect: str = "cypher"
    rounds: int = 10
    queries_per_round: int = 20
    graph: dict = field(default_factory=dict)
    generator: dict = field(default_factory=dict)
    engines: list = field(default_factory=list)
    comparator: dict = field(default_factory=dict)
    lint: dict | None = None
    output_dir: str = "graphdiff-out"

    _KEYS = ("seed", "dialect", "rounds", "queries_per_round", "graph",
             "generator", "engines", "comparator", "lint", "output_dir")

    def validate(self) -> None:
        if self.dialect not in ("cypher", "gremlin"):
            raise CampaignError(f"unknown dialect {self.dialect!r}")
        if self.rounds < 1:
            raise CampaignError("rounds must be at least 1")
        if self.queries_per_round < 1:
            raise CampaignError("queries_per_round must be at least 1")
        if len(self.engine_specs()) != 2:
            raise CampaignError("a campaign compares exactly 2 engines")
        mode = self.generator.get("mode", "replay")
        if mode not in ("replay", "remote"):
            raise CampaignError(f"unknown generator mode {mode!r}")
        if not self.generator.get("fixture"):
            raise CampaignError("generator.fixture path is required")
        if mode == "remote" and not self.generator.get("endpoint"):
            raise CampaignError("generator.endpoint is required in remote mode")
        if "credential" in self.generator or "api_key" in self.generator:
            raise CampaignError(
                "credentials never go in config files; set generator."
                "credential_env to the name of an environment variable"
            )

    def engine_specs(self) -> list[dict]:
        if self.engines:
            return self.engines
        return [
            {"kind": "reference", "name": "ref-a", "dialect": self.dialect},
            {"kind": "reference", "name": "ref-b", "dialect": self.dialect},
        ]

    def rel_tol(self) -> float:
        return float(self.comparator.get("rel_tol", REL_TOL))

    def abs_floor(self) -> float:
        return float(self.comparator.get("abs_floor", ABS_FLOOR))

    def deny_lists(self) -> dict[str, DenyLists]:
        if not self.lint:
            return DEFAULT_DENY
        deny = dict(DEFAULT_DENY)
        base = deny[self.dialect]
        deny[self.dialect] = DenyLists(
            nondeterministic=tuple(self.lint.get(
                "nondeterministic", base.nondeterministic)),
            mutating=tuple(self.lint.get("mutating", base.mutating)),
        )
        return deny

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self._KEYS}


def load_config(path: str) -> CampaignConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise CampaignError(f"cannot read config {path!r}: {exc}")
    except ValueError as exc:
        raise CampaignError(f"config {path!r} is not valid JSON: {exc}")
    return config_from_json(doc, origin=path)


def config_from_json(doc: dict, origin: str = "<config>") -> CampaignConfig:
    if not isinstance(doc, dict):
        raise CampaignError(f"{origin}: config must be a JSON object")
    unknown = set(doc) - set(CampaignConfig._KEYS)
    if unknown:
        raise CampaignError(f"{origin}: unknown config keys {sorted(unknown)}")
    cfg = CampaignConfig(**doc)
    cfg.validate()
    return cfg


def config_sha256(cfg: CampaignConfig) -> str:
    doc = json.dumps(cfg.to_json(), sort_keys=True).encode()
    return hashlib.sha256(doc).hexdigest()


# --- graph and generator setup -----------------------------------------------------

def campaign_graph(cfg: CampaignConfig) -> LabeledPropertyGraph:
    g = cfg.graph
    if "path" in g:
        return load_graph(g["path"])
    params = GenParams(
        nodes=int(g.get("nodes", 100)),
        edges=int(g.get("edges", 200)),
        seed=int(g.get("seed", cfg.seed)),
    )
    schema = generate_schema(
        node_labels=int(g.get("node_labels", 4)),
        edge_labels=int(g.get("edge_labels", 4)),
        property_keys=int(g.get("property_keys", 11)),
    )
    return generate_graph(schema, params)


def make_generator(cfg: CampaignConfig):
    gen = cfg.generator
    if gen.get("mode", "replay") == "replay":
        return ReplayGenerator(gen["fixture"])
    return RemoteGenerator(
        endpoint=gen["endpoint"],
        model=gen.get("model", "gpt-3.5-turbo-16k-0613"),
        temperature=float(gen.get("temperature", 1.0)),
        credential_env=gen.get("credential_env"),
        fixture_path=gen["fixture"],
        timeout_s=float(gen.get("timeout_s", 120.0)),
    )


# --- per-query processing ----------------------------------------------------------

def _execute_one(adapter: EngineAdapter, text: str) -> tuple[dict, Outcome]:
    """Runs one query on one engine; returns the execution record and the
    comparison-ready outcome in one pass."""
    style = adapter.capabilities().style
    started = time.perf_counter()
    try:
        raw = adapter.execute(text)
    except AdapterError as exc:
        raw = EngineError("adapter-failure", str(exc))
    latency_ms = round((time.perf_counter() - started) * 1000.0, 3)
    record: dict = {"engine": adapter.name, "latency_ms": latency_ms}
    if isinstance(raw, Timeout):
        record.update(status="timeout", timeout_s=raw.seconds)
        return record, Outcome("timeout", detail=f"{raw.seconds}s")
    if isinstance(raw, EngineError):
        record.update(status="engine-error",
                      error={"class": raw.error_class, "message": raw.message})
        return record, Outcome("engine-error", error_class=raw.error_class,
                               detail=raw.message)
    record["rows"] = list(raw.rows)
    try:
        records = normalize_result(
            raw.rows, style,
            executor=lambda q: adapter.execute(q),
        )
    except NormalizationError as exc:
        record.update(status="normalization-failure", normalization_error=str(exc))
        return record, Outcome("normalization-failure", detail=str(exc))
    record.update(status="rows", row_count=len(records.records))
    return record, Outcome("rows", records=records)


def process_query(text: str, round_no: int, index: int, cfg: CampaignConfig,
                  adapters: list[EngineAdapter]) -> dict:
    record: dict = {
        "round": round_no,
        "index": index,
        "dialect": cfg.dialect,
        "text": text,
        "fingerprint": sorted(operator_fingerprint(text, cfg.dialect)),
    }
    verdict = lint_query(text, cfg.dialect, cfg.deny_lists())
    lint_doc: dict = {"status": verdict.status}
    if verdict.token:
        lint_doc["token"] = verdict.token
    if verdict.reason:
        lint_doc["reason"] = verdict.reason
    record["lint"] = lint_doc
    if not verdict.passed:
        record.update(executions=[], verdict=None, non_empty=None)
        return record
    pairs = [_execute_one(a, text) for a in adapters]
    record["executions"] = [execution for execution, _ in pairs]
    outcomes = [outcome for _, outcome in pairs]
    ordered = is_ordered_query(text, cfg.dialect)
    record["verdict"] = verdict_for(
        outcomes[0], outcomes[1], ordered=ordered,
        rel_tol=cfg.rel_tol(), abs_floor=cfg.abs_floor(),
    ).to_json()
    first = outcomes[0]
    record["non_empty"] = bool(
        first.status == "rows" and first.records.non_empty
    )
    return record


# --- aggregation -------------------------------------------------------------------

def format_ratio(numerator: int, denominator: int) -> str:
    if denominator == 0:
        return "N/A"
    return f"{100.0 * numerator / denominator:.2f}%"


def compute_aggregates(records: list[dict]) -> dict:
    lint_counts = {"pass": 0, "nondeterministic": 0, "mutating": 0,
                   "unparseable": 0}
    verdict_counts = {"equivalent": 0, "discrepancy": 0, "incomparable": 0}
    kinds: dict[str, int] = {}
    reasons: dict[str, int] = {}
    numerator = 0
    denominator = 0
    for record in records:
        lint_counts[record["lint"]["status"]] += 1
        verdict = record.get("verdict")
        if verdict:
            verdict_counts[verdict["status"]] += 1
            if verdict["status"] == "discrepancy":
                kinds[verdict["kind"]] = kinds.get(verdict["kind"], 0) + 1
            elif verdict["status"] == "incomparable":
                reasons[verdict["reason"]] = reasons.get(verdict["reason"], 0) + 1
        if record["lint"]["status"] == "pass":
            denominator += 1
            if record.get("non_empty"):
                numerator += 1
    return {
        "queries": len(records),
        "lint": lint_counts,
        "verdicts": verdict_counts,
        "discrepancy_kinds": dict(sorted(kinds.items())),
        "incomparable_reasons": dict(sorted(reasons.items())),
        "non_empty": {
            "numerator": numerator,
            "denominator": denominator,
            "display": format_ratio(numerator, denominator),
        },
    }


def dedup_discrepancies(records: list[dict]) -> list[dict]:
    """Clusters discrepancy records by (operator fingerprint, kind)."""
    clusters: dict[tuple, dict] = {}
    for record in records:
        verdict = record.get("verdict")
        if not verdict or verdict["status"] != "discrepancy":
            continue
        key = (tuple(record["fingerprint"]), verdict["kind"])
        cluster = clusters.get(key)
        if cluster is None:
            clusters[key] = {
                "fingerprint": list(record["fingerprint"]),
                "kind": verdict["kind"],
                "count": 1,
                "representative": {
                    "round": record["round"],
                    "index": record["index"],
                    "text": record["text"],
                },
            }
        else:
            cluster["count"] += 1
    return sorted(
        clusters.values(),
        key=lambda c: (-c["count"], c["kind"], c["fingerprint"]),
    )


# --- progress log ------------------------------------------------------------------

def _read_progress(path: str, expected_sha: str) -> dict[int, list[dict]]:
    done: dict[int, list[dict]] = {}
    if not os.path.exists(path):
        return done
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except ValueError as exc:
                raise CampaignError(f"{path}:{lineno}: bad progress line ({exc})")
            if "config_sha256" in doc:
                if doc["config_sha256"] != expected_sha:
                    raise CampaignError(
                        f"{path} belongs to a different campaign config; "
                        "remove it or change output_dir"
                    )
                continue
            done[doc["round"]] = doc["records"]
    return done


def _append_progress(path: str, doc: dict) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(doc, sort_keys=True) + "\n")


# --- campaign driver ---------------------------------------------------------------

def run_campaign(cfg: CampaignConfig, resume: bool = False) -> dict:
    cfg.validate()
    os.makedirs(cfg.output_dir, exist_ok=True)
    started = time.time()
    graph = campaign_graph(cfg)
    with open(os.path.join(cfg.output_dir, "graph.json"), "w",
              encoding="utf-8") as fh:
        json.dump(graph_to_json(graph), fh, sort_keys=True)
        fh.write("\n")

    sha = config_sha256(cfg)
    progress_path = os.path.join(cfg.output_dir, "progress.jsonl")
    done: dict[int, list[dict]] = {}
    if resume:
        done = _read_progress(progress_path, sha)
    elif os.path.exists(progress_path):
        os.remove(progress_path)
    if not os.path.exists(progress_path):
        _append_progress(progress_path, {"config_sha256": sha})

    profile = with_queries_per_round(
        default_profile(cfg.dialect), cfg.queries_per_round)
    prompt = build_prompt(graph, profile)
    generator = make_generator(cfg)
    max_retries = int(cfg.generator.get("max_retries", 3))

    adapters = [make_adapter(spec) for spec in cfg.engine_specs()]
    records: list[dict] = []
    try:
        for adapter in adapters:
            if not adapter.ping():
                raise CampaignError(f"engine {adapter.name!r} does not answer ping")
            adapter.load(graph)
        for round_no in range(1, cfg.rounds + 1):
            if round_no in done:
                records.extend(done[round_no])
                continue
            response = _generate_with_retries(
                generator, GenerationRequest(
                    prompt=prompt.text, round_no=round_no,
                    model=cfg.generator.get("model", "gpt-3.5-turbo-16k-0613"),
                    temperature=float(cfg.generator.get("temperature", 1.0)),
                ), max_retries)
            queries = parse_generation_response(response, cfg.dialect)
            queries = queries[:cfg.queries_per_round]
            round_records = [
                process_query(q.text, round_no, i, cfg, adapters)
                for i, q in enumerate(queries, start=1)
            ]
            records.extend(round_records)
            _append_progress(progress_path, {
                "round": round_no, "records": round_records,
            })
    finally:
        for adapter in adapters:
            adapter.close()

    records.sort(key=lambda r: (r["round"], r["index"]))
    report = {
        "schema_version": SCHEMA_VERSION,
        "config": cfg.to_json(),
        "graph": {
            "nodes": len(graph.nodes),
            "edges": len(graph.edges),
        },
        "prompt_chars": len(prompt.text),
        "records": records,
        "aggregates": compute_aggregates(records),
        "clusters": dedup_discrepancies(records),
        "timing": {
            "started_at": started,
            "finished_at": time.time(),
            "total_s": round(time.time() - started, 3),
        },
    }
    report_path = os.path.join(cfg.output_dir, "report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return report


def _generate_with_retries(generator, req: GenerationRequest, max_retries: int):
    last: GenerationError | None = None
    for _ in range(max(1, max_retries)):
        try:
            return generator.generate_round(req)
        except TransportError as exc:
            last = exc
        except GenerationError:
            raise
    raise CampaignError(f"round {req.round_no}: generation failed: {last}")


def strip_timing(doc):
    """Removes every timing artifact; what remains must be deterministic."""
    if isinstance(doc, dict):
        return {
            k: strip_timing(v) for k, v in doc.items()
            if k not in ("timing", "latency_ms")
        }
    if isinstance(doc, list):
        return [strip_timing(v) for v in doc]
    return doc


def report_to_text(report: dict) -> str:
    """Plain JSON with sorted keys, as written to report.json."""
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


# --- digest ------------------------------------------------------------------------

def render_digest(report: dict) -> str:
    agg = report["aggregates"]
    lines = [
        "# Differential campaign digest",
        "",
        f"Dialect: {report['config']['dialect']}  |  "
        f"graph: {report['graph']['nodes']} nodes / {report['graph']['edges']} edges  |  "
        f"rounds: {report['config']['rounds']}",
        "",
        "| metric | count |",
        "| --- | --- |",
        f"| queries | {agg['queries']} |",
        f"| lint pass | {agg['lint']['pass']} |",
        f"| lint nondeterministic | {agg['lint']['nondeterministic']} |",
        f"| lint mutating | {agg['lint']['mutating']} |",
        f"| lint unparseable | {agg['lint']['unparseable']} |",
        f"| equivalent | {agg['verdicts']['equivalent']} |",
        f"| discrepancy | {agg['verdicts']['discrepancy']} |",
        f"| incomparable | {agg['verdicts']['incomparable']} |",
        f"| non-empty ratio | {agg['non_empty']['display']} |",
        "",
    ]
    clusters = report.get("clusters", [])
    if clusters:
        lines.append("## Discrepancy clusters")
        lines.append("")
        lines.append("| size | kind | operators | example |")
        lines.append("| --- | --- | --- | --- |")
        for cluster in clusters:
            ops = ", ".join(cluster["fingerprint"]) or "(none)"
            text = cluster["representative"]["text"]
            if len(text) > 60:
                text = text[:57] + "..."
            lines.append(
                f"| {cluster['count']} | {cluster['kind']} | {ops} | `{text}` |"
            )
        lines.append("")
    return "\n".join(lines)
