"""Command-line interface.

Exit codes: 0 on success, 1 when a detection check fails (a campaign run
with --fail-on-discrepancy that found discrepancies, an injection suite row
that missed its fault, a replay that did not reproduce its report), 2 on
operational errors (bad config, unreachable engine, bad input).
"""

from __future__ import annotations

import argparse
import json
import sys

from .adapters import AdapterError
from .campaign import (
    CampaignError, config_from_json, load_config, render_digest,
    report_to_text, run_campaign, strip_timing,
)
from .generate import (
    GenParams, generate_graph, generate_schema, save_graph,
    serialize_edges_piped, serialize_edges_plain,
)
from .inject import InjectionError, render_injection_table, run_injection_suite
from .lint import lint_query
from .model import GraphValidationError
from .prompting import build_prompt, default_profile, with_queries_per_round
from .querygen import GenerationError, GenerationRequest, parse_generation_response

OPERATIONAL_ERRORS = (
    CampaignError, AdapterError, GenerationError, InjectionError,
    GraphValidationError, OSError, ValueError,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphdiff",
        description="differential testing for graph database engines",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="generate a labeled property graph")
    p.add_argument("--nodes", type=int, default=100)
    p.add_argument("--edges", type=int, default=200)
    p.add_argument("--node-labels", type=int, default=4)
    p.add_argument("--edge-labels", type=int, default=4)
    p.add_argument("--property-keys", type=int, default=11)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the graph as JSON to this path")
    p.add_argument("--serialize", choices=("plain", "piped"),
                   help="print the edge serialization to stdout")

    p = sub.add_parser("gen-queries",
                       help="generate one round of queries via the configured generator")
    p.add_argument("--config", required=True)
    p.add_argument("--round", type=int, default=1)
    p.add_argument("--prompt-only", action="store_true",
                   help="print the prompt instead of calling the generator")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("lint", help="classify queries against the deny lists")
    p.add_argument("--dialect", choices=("cypher", "gremlin"), required=True)
    p.add_argument("--query", action="append", default=[],
                   help="query text (repeatable)")
    p.add_argument("--file", help="file with one query per line")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("run", help="run a differential campaign")
    p.add_argument("--config", required=True)
    p.add_argument("--resume", action="store_true",
                   help="reuse finished rounds from progress.jsonl")
    p.add_argument("--fail-on-discrepancy", action="store_true")
    p.add_argument("--print-config", action="store_true",
                   help="print the effective config and exit")

    p = sub.add_parser("inject", help="self-test: verify each fault is detected")
    p.add_argument("--no-inject", action="store_true",
                   help="false-positive check: run with all faults off")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("replay",
                       help="re-run a recorded campaign and check determinism")
    p.add_argument("--config", required=True)
    p.add_argument("--against",
                   help="existing report.json the replay must reproduce")

    p = sub.add_parser("report", help="summarize an existing report")
    p.add_argument("--input", required=True, help="path to report.json")
    p.add_argument("--json", action="store_true",
                   help="print aggregates as JSON instead of the digest")
    return parser


def _cmd_gen_graph(args) -> int:
    params = GenParams(nodes=args.nodes, edges=args.edges, seed=args.seed)
    schema = generate_schema(args.node_labels, args.edge_labels,
                             args.property_keys)
    graph = generate_graph(schema, params)
    if args.out:
        save_graph(graph, args.out)
        print(f"wrote {len(graph.nodes)} nodes / {len(graph.edges)} edges "
              f"to {args.out}")
    if args.serialize:
        lines = (serialize_edges_plain(graph) if args.serialize == "plain"
                 else serialize_edges_piped(graph))
        for line in lines:
            print(line)
    if not args.out and not args.serialize:
        print(json.dumps({"nodes": len(graph.nodes), "edges": len(graph.edges)}))
    return 0


def _cmd_gen_queries(args) -> int:
    from .campaign import campaign_graph, make_generator

    cfg = load_config(args.config)
    graph = campaign_graph(cfg)
    profile = with_queries_per_round(
        default_profile(cfg.dialect), cfg.queries_per_round)
    prompt = build_prompt(graph, profile)
    if args.prompt_only:
        sys.stdout.write(prompt.text)
        return 0
    generator = make_generator(cfg)
    response = generator.generate_round(GenerationRequest(
        prompt=prompt.text, round_no=args.round,
        model=cfg.generator.get("model", "gpt-3.5-turbo-16k-0613"),
        temperature=float(cfg.generator.get("temperature", 1.0)),
    ))
    queries = parse_generation_response(response, cfg.dialect)
    if args.json:
        print(json.dumps([q.text for q in queries], indent=2))
    else:
        for q in queries:
            print(q.text)
    return 0


def _cmd_lint(args) -> int:
    queries = list(args.query)
    if args.file:
        with open(args.file, encoding="utf-8") as fh:
            queries.extend(line.strip() for line in fh if line.strip())
    if not queries:
        queries = [line.strip() for line in sys.stdin if line.strip()]
    results = []
    for text in queries:
        verdict = lint_query(text, args.dialect)
        results.append({"query": text, "status": verdict.status,
                        "token": verdict.token, "reason": verdict.reason})
    if args.json:
        print(json.dumps(results, indent=2))
    else:
        for r in results:
            extra = f" ({r['token'] or r['reason']})" if r["status"] != "pass" else ""
            print(f"{r['status']:<16} {r['query']}{extra}")
    return 0


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.print_config:
        print(json.dumps(cfg.to_json(), indent=2, sort_keys=True))
        return 0
    report = run_campaign(cfg, resume=args.resume)
    print(render_digest(report))
    discrepancies = report["aggregates"]["verdicts"]["discrepancy"]
    if args.fail_on_discrepancy and discrepancies > 0:
        print(f"{discrepancies} discrepancies found", file=sys.stderr)
        return 1
    return 0


def _cmd_inject(args) -> int:
    results = run_injection_suite(inject=not args.no_inject)
    if args.json:
        slim = [{k: v for k, v in row.items() if k not in ("records", "clusters")}
                for row in results]
        print(json.dumps(slim, indent=2))
    else:
        print(render_injection_table(results))
    failed = [r for r in results if r["detected"] != r["injected"]]
    return 1 if failed else 0


def _cmd_replay(args) -> int:
    cfg = load_config(args.config)
    if cfg.generator.get("mode", "replay") != "replay":
        doc = cfg.to_json()
        doc["generator"] = dict(doc["generator"], mode="replay")
        cfg = config_from_json(doc, origin=args.config)
    # read before the run: --against may point inside output_dir, which the
    # replay rewrites
    recorded = None
    if args.against:
        with open(args.against, encoding="utf-8") as fh:
            recorded = json.load(fh)
    report = run_campaign(cfg)
    print(render_digest(report))
    if recorded is None:
        return 0
    ours = report_to_text(strip_timing(report))
    theirs = report_to_text(strip_timing(recorded))
    if ours == theirs:
        print("replay matches the recorded report")
        return 0
    print("replay DOES NOT match the recorded report", file=sys.stderr)
    return 1


def _cmd_report(args) -> int:
    with open(args.input, encoding="utf-8") as fh:
        report = json.load(fh)
    if args.json:
        print(json.dumps(report["aggregates"], indent=2, sort_keys=True))
    else:
        print(render_digest(report))
    return 0


_COMMANDS = {
    "gen-graph": _cmd_gen_graph,
    "gen-queries": _cmd_gen_queries,
    "lint": _cmd_lint,
    "run": _cmd_run,
    "inject": _cmd_inject,
    "replay": _cmd_replay,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except OPERATIONAL_ERRORS as exc:
        print(f"graphdiff: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
