"""Headless entry point: run scenarios, compare conditions, sweep scaling,
evaluate the parser round trip, validate spec files, and serve a session."""

from __future__ import annotations

import argparse
import json
import sys

from .domain import SpecError, parse_domain_spec
from .nlu import (
    IN_DOMAIN_LABELS,
    generate_training_data,
    parse,
    parse_lexicon,
    split_examples,
    train,
    validate_lexicon,
)
from .scenarios import (
    SCENARIOS,
    MetricsReport,
    compare_conditions,
    run_benchmark,
    run_scaling_sweep,
)

USAGE_ERROR = 2
RUN_FAILURE = 1


def _scenario_domain(name_or_path: str):
    if name_or_path in SCENARIOS:
        from . import scenarios

        doc_builder = {
            "museum": scenarios.museum_documents,
            "antipodal": scenarios.antipodal_documents,
            "evacuation": scenarios.evacuation_documents,
            "tradeshow": scenarios.tradeshow_documents,
        }[name_or_path]
        return parse_domain_spec(json.dumps(doc_builder(0)))
    with open(name_or_path, "r", encoding="utf-8") as f:
        return parse_domain_spec(f.read())


def cmd_run(args) -> int:
    if args.scenario not in SCENARIOS:
        print(f"unknown scenario {args.scenario!r}", file=sys.stderr)
        return USAGE_ERROR
    if args.scenario in SCENARIOS and args.traces:
        _, world = SCENARIOS[args.scenario](seed=args.seed, nli_enabled=not args.no_nli)
        report = run_benchmark(
            args.scenario, seed=args.seed, nli_enabled=not args.no_nli,
            max_ticks=args.max_ticks, world=world,
        )
        with open(args.traces, "w", encoding="utf-8") as f:
            for trace in world.metrics.traces:
                f.write(trace.to_json_line() + "\n")
    else:
        report = run_benchmark(
            args.scenario,
            seed=args.seed,
            nli_enabled=not args.no_nli,
            max_ticks=args.max_ticks,
        )
    payload = report.to_json(include_timings=args.timings)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(payload + "\n")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as f:
            f.write(report.csv_header() + "\n" + report.csv_row(args.timings) + "\n")
    print(payload)
    if args.require_solved and not report.solved:
        print("run did not solve within the tick budget", file=sys.stderr)
        return RUN_FAILURE
    return 0


def cmd_compare(args) -> int:
    if args.scenario not in SCENARIOS:
        print(f"unknown scenario {args.scenario!r}", file=sys.stderr)
        return USAGE_ERROR
    with_nli, without = compare_conditions(
        args.scenario, seed=args.seed, max_ticks=args.max_ticks
    )
    header = f"{'condition':<12}{'agents':>7}{'solution_time':>15}{'questions':>11}{'statements':>12}{'overheard':>11}"
    print(header)
    for label, rep in (("with-nli", with_nli), ("without-nli", without)):
        solution = "unsolved" if rep.solution_time is None else f"{rep.solution_time:.1f}"
        print(
            f"{label:<12}{rep.agents:>7}{solution:>15}{rep.questions:>11}"
            f"{rep.statements:>12}{rep.facts_overheard:>11}"
        )
    if args.out:
        doc = {
            "scenario": args.scenario,
            "seed": args.seed,
            "with_nli": with_nli.to_dict(include_timings=args.timings),
            "without_nli": without.to_dict(include_timings=args.timings),
        }
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump(doc, f, indent=2, sort_keys=True)
            f.write("\n")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as f:
            f.write(with_nli.csv_header() + "\n")
            f.write(with_nli.csv_row(args.timings) + "\n")
            f.write(without.csv_row(args.timings) + "\n")
    return 0


def cmd_sweep(args) -> int:
    try:
        points = [int(p) for p in args.points.split(",")]
    except ValueError:
        print("--points must be comma-separated integers", file=sys.stderr)
        return USAGE_ERROR
    if args.axis not in ("agents", "domain"):
        print("--axis must be agents or domain", file=sys.stderr)
        return USAGE_ERROR
    if len(points) < 3:
        print("need at least 3 sweep points", file=sys.stderr)
        return USAGE_ERROR
    rows = run_scaling_sweep(args.axis, points, seed=args.seed)
    lines = ["axis,value,initial_plan_time,mean_replan_time"]
    for row in rows:
        lines.append(
            f"{row['axis']},{row['value']},{row['initial_plan_time']:.6f},{row['mean_replan_time']:.6f}"
        )
    output = "\n".join(lines)
    print(output)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(output + "\n")
    return 0


def nlu_roundtrip_eval(domain, lexicon, seed: int) -> dict:
    examples = generate_training_data(lexicon, domain, rng_seed=seed)
    generated = [e for e in examples if e.nl_i in IN_DOMAIN_LABELS]
    fixed = [e for e in examples if e.nl_i not in IN_DOMAIN_LABELS]
    train_half, held = split_examples(generated, seed=seed)
    model = train(train_half + fixed)
    ok_label = ok_nle = 0
    for example in held:
        parsed = parse(model, lexicon, example.text)
        ok_label += parsed.nl_i == example.nl_i
        want = sorted(set((s.nle_type, s.ref) for s in example.spans))
        got = sorted(set((m.nle_type, m.ref) for m in parsed.nles))
        ok_nle += want == got
    n = max(1, len(held))
    return {
        "corpus_size": len(examples),
        "held_out": len(held),
        "nl_i_accuracy": ok_label / n,
        "nle_accuracy": ok_nle / n,
    }


def cmd_nlu_eval(args) -> int:
    try:
        domain = _scenario_domain(args.domain)
    except (OSError, SpecError) as exc:
        print(f"cannot load domain: {exc}", file=sys.stderr)
        return USAGE_ERROR
    if args.lexicon:
        with open(args.lexicon, "r", encoding="utf-8") as f:
            lexicon = parse_lexicon(json.load(f))
    elif domain.lexicon is not None:
        lexicon = parse_lexicon(domain.lexicon)
    else:
        print("domain has no embedded lexicon; pass one explicitly", file=sys.stderr)
        return USAGE_ERROR
    result = nlu_roundtrip_eval(domain, lexicon, args.seed)
    print(json.dumps(result, indent=2, sort_keys=True))
    return 0


def cmd_validate(args) -> int:
    try:
        with open(args.spec, "r", encoding="utf-8") as f:
            domain = parse_domain_spec(f.read())
    except OSError as exc:
        print(f"cannot read {args.spec}: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except SpecError as exc:
        print(f"invalid domain spec: {exc}", file=sys.stderr)
        return USAGE_ERROR
    problems = []
    if domain.lexicon is not None:
        try:
            lexicon = parse_lexicon(domain.lexicon)
            problems = validate_lexicon(lexicon, domain)
        except SpecError as exc:
            problems = [str(exc)]
    if problems:
        for p in problems:
            print(f"lexicon: {p}", file=sys.stderr)
        return USAGE_ERROR
    print(
        f"ok: {len(domain.entities)} entities, {len(domain.predicates)} predicates, "
        f"{len(domain.actions)} actions, {len(domain.agents)} agents"
    )
    return 0


def cmd_serve(args) -> int:
    if args.scenario not in SCENARIOS:
        print(f"unknown scenario {args.scenario!r}", file=sys.stderr)
        return USAGE_ERROR
    from .server import serve_scenario

    serve_scenario(args.scenario, seed=args.seed, port=args.port, speed=args.speed)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parley",
        description="Multi-agent planning-and-dialogue simulation benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and report metrics")
    run.add_argument("scenario")
    run.add_argument("--no-nli", action="store_true", help="disable verbal interaction")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--max-ticks", type=int, default=6000)
    run.add_argument("--out", help="write the JSON report here")
    run.add_argument("--timings", action="store_true", help="include wall-clock timings")
    run.add_argument("--csv", help="also write the fixed-column CSV row here")
    run.add_argument("--traces", help="write newline-delimited JSON plan traces here")
    run.add_argument("--require-solved", action="store_true")
    run.set_defaults(func=cmd_run)

    comp = sub.add_parser("compare", help="run with and without interaction")
    comp.add_argument("scenario")
    comp.add_argument("--seed", type=int, default=0)
    comp.add_argument("--max-ticks", type=int, default=6000)
    comp.add_argument("--out")
    comp.add_argument("--csv", help="also write fixed-column CSV rows here")
    comp.add_argument("--timings", action="store_true")
    comp.set_defaults(func=cmd_compare)

    sweep = sub.add_parser("sweep", help="planning-time scaling sweep")
    sweep.add_argument("--axis", required=True)
    sweep.add_argument("--points", required=True)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--out")
    sweep.set_defaults(func=cmd_sweep)

    nlu = sub.add_parser("nlu-eval", help="parser round-trip accuracy")
    nlu.add_argument("domain", help="scenario name or domain spec path")
    nlu.add_argument("lexicon", nargs="?", help="lexicon JSON path (optional)")
    nlu.add_argument("--seed", type=int, default=0)
    nlu.set_defaults(func=cmd_nlu_eval)

    val = sub.add_parser("validate", help="validate a domain spec file")
    val.add_argument("spec")
    val.set_defaults(func=cmd_validate)

    srv = sub.add_parser("serve", help="serve a live session over WebSocket")
    srv.add_argument("scenario")
    srv.add_argument("--port", type=int, default=8765)
    srv.add_argument("--seed", type=int, default=0)
    srv.add_argument("--speed", type=float, default=1.0)
    srv.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUN_FAILURE


if __name__ == "__main__":
    sys.exit(main())
