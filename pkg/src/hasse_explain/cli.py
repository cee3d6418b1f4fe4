"""Command-line interface.

Exit codes: 0 success, 2 parse or validation error, 3 unanswerable query,
4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence

from . import __version__
from .baseline import stats
from .errors import HasseExplainError, ParseError, ValidationError
from .explain import Query, explain
from .io import diagram_to_dict, export_dot, load_episodes, save_episodes, write_episodes
from .model import Episode, Feature
from .scenarios import DOMAINS, ScenarioConfig, generate
from .summarize import aggregate, build_all, filter_corpus, verify_complete, verify_correct

FEATURE_HELP = (
    "comma-separated feature atoms: TASK means the task was completed, "
    "AGENT:TASK means that agent completed it (e.g. 'A,2:C')"
)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _features(text: str) -> list[Feature]:
    try:
        return [Feature.parse(x) for x in _str_list(text)]
    except ValidationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)


def _corpus(args) -> list[Episode]:
    episodes = load_episodes(args.episodes)
    if getattr(args, "filter_agents", None) is not None or getattr(args, "filter_tasks", None) is not None:
        episodes = filter_corpus(episodes, args.filter_agents, args.filter_tasks)
    return episodes


def _describe(d, rank: int, st) -> list[str]:
    lines = [
        f"#{rank} likelihood {st.likelihood} ({float(st.likelihood):.3f}), "
        f"|V|={st.vertex_count} |E|={st.edge_count}, e.g. episode {st.episode_ids[0]}"
    ]
    for u, w in sorted(d.edges):
        lines.append(f"  {d.by_id[u].label} -> {d.by_id[w].label}")
    return lines


def cmd_generate(args) -> int:
    cfg = ScenarioConfig(
        args.domain, args.agents, args.tasks, args.episodes, args.seed,
        width=args.width, height=args.height, joint_fraction=args.joint_fraction,
        precedence_depth=args.precedence_depth, route_length=args.route_length,
        radius=args.radius, epsilon=args.epsilon,
    )
    episodes = generate(cfg)
    if args.out:
        save_episodes(episodes, args.out)
    else:
        write_episodes(episodes, sys.stdout)
    return 0


def cmd_summarize(args) -> int:
    episodes = _corpus(args)
    diagrams = build_all(episodes)
    agg = aggregate(diagrams=diagrams)
    top = agg.top(args.top_k)
    verified = None
    if args.verify:
        ok = sum(
            verify_correct(d, e, args.path_limit) and verify_complete(d, e, args.path_limit)
            for d, e in zip(diagrams, episodes)
        )
        verified = {"passed": ok, "total": len(episodes)}

    if args.format == "dot":
        _emit("".join(export_dot(d) for d, _ in top), args.out)
    elif args.format == "json":
        _emit(_json({
            "episodes": agg.total,
            "distinct": len(agg.groups),
            "edge_histogram": {str(k): v for k, v in sorted(agg.edge_histogram.items())},
            "top": [
                {
                    "rank": i,
                    "count": st.occurrence_count,
                    "likelihood": str(st.likelihood),
                    "episodes": list(st.episode_ids),
                    "diagram": diagram_to_dict(d),
                }
                for i, (d, st) in enumerate(top, start=1)
            ],
            **({"verified": verified} if verified else {}),
        }), args.out)
    else:
        hist = ", ".join(f"{k}:{v}" for k, v in sorted(agg.edge_histogram.items()))
        lines = [
            f"episodes: {agg.total}",
            f"distinct diagrams: {len(agg.groups)}",
            f"edge-count histogram: {hist}",
        ]
        if verified:
            lines.append(f"verified correct and complete: {verified['passed']}/{verified['total']}")
        for i, (d, st) in enumerate(top, start=1):
            lines.extend(_describe(d, i, st))
        _emit("\n".join(lines), args.out)
    if verified and verified["passed"] != verified["total"]:
        return 1
    return 0


def cmd_explain(args) -> int:
    diagrams = build_all(_corpus(args))
    options = {}
    if args.kind == "what":
        query = Query.what(args.task)
    else:
        options["match"] = args.match
        if args.features:
            options["features"] = args.features
        if args.kind == "when":
            query = Query.when(args.agents, args.task)
            options["nontargets"] = args.nontargets
        else:
            query = Query.why_not(args.agents, args.task, args.given or [])
    result = explain(query, diagrams, **options)
    if args.format == "json":
        _emit(_json({
            "query": {
                "kind": query.kind.value,
                "task": query.task,
                "agents": sorted(query.agents),
                "conditions": [f.name for f in sorted(query.conditions)],
            },
            "certain": [getattr(x, "name", x) for x in result.certain],
            "uncertain": [getattr(x, "name", x) for x in result.uncertain],
            "text": result.text,
            "diagnostics": result.diagnostics,
        }), args.out)
    else:
        _emit(result.text, args.out)
        if note := result.diagnostics.get("note"):
            print(f"note: {note}", file=sys.stderr)
    return 0


def cmd_stats(args) -> int:
    episodes = _corpus(args)
    report = stats(episodes, baseline=args.baseline)
    if args.format == "json":
        _emit(_json(report.to_dict(timing=args.timing)), args.out)
        return 0
    hist = ", ".join(f"{k}:{v}" for k, v in sorted(report.edge_histogram.items()))
    lines = [
        f"episodes: {report.episodes}",
        f"distinct diagrams: {report.distinct}",
        f"edge-count histogram: {hist}",
        f"mean |V|: {float(report.mean_vertices):.2f}",
        f"mean |E|: {float(report.mean_edges):.2f}",
    ]
    if report.baseline_nodes is not None:
        lines.append(f"baseline nodes: {report.baseline_nodes}")
        lines.append(f"baseline edges: {report.baseline_edges}")
    if args.timing:
        lines.append(f"summarize seconds: {report.seconds:.4f}")
    _emit("\n".join(lines), args.out)
    return 0


def cmd_export_dot(args) -> int:
    episodes = _corpus(args)
    chosen = [e for e in episodes if e.id == args.episode] if args.episode else episodes[:1]
    if not chosen:
        raise ValidationError(f"no episode with id {args.episode!r}")
    d = build_all(chosen)[0]
    if args.format == "json":
        _emit(_json(diagram_to_dict(d)), args.out)
    else:
        _emit(export_dot(d), args.out)
    return 0


def _corpus_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--episodes", required=True, help="episode corpus (JSON Lines)")
    p.add_argument("--filter-agents", type=_int_list, metavar="IDS", help="keep only these agents")
    p.add_argument("--filter-tasks", type=_str_list, metavar="TASKS", help="keep only these tasks")
    p.add_argument("--out", help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hasse-explain",
        description="Summarize multi-agent task traces as Hasse diagrams and answer queries about them.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    # accepted everywhere so scripted runs can pass a seed uniformly
    parser.add_argument("--seed", type=int, default=0, help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="simulate an episode corpus")
    g.add_argument("--domain", choices=DOMAINS, required=True)
    g.add_argument("--agents", type=int, required=True)
    g.add_argument("--tasks", type=int, required=True)
    g.add_argument("--episodes", type=int, default=100)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--width", type=int)
    g.add_argument("--height", type=int)
    g.add_argument("--joint-fraction", type=float)
    g.add_argument("--precedence-depth", type=int, help="pp only: length of the plate chain")
    g.add_argument("--route-length", type=int, help="rw only: rows between goals and shelves")
    g.add_argument("--radius", type=int, help="observation radius (default 4 for pp, else 1)")
    g.add_argument("--epsilon", type=float, default=0.1, help="probability of a random move")
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("summarize", help="build and aggregate per-episode diagrams")
    _corpus_options(s)
    s.add_argument("--top-k", type=int, default=3)
    s.add_argument("--verify", action="store_true", help="check every diagram is correct and complete")
    s.add_argument("--path-limit", type=int, default=10_000)
    s.add_argument("--format", choices=("text", "json", "dot"), default="text")
    s.add_argument("--seed", type=int, help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_summarize)

    e = sub.add_parser("explain", help="answer a when, whynot or what query")
    esub = e.add_subparsers(dest="kind", required=True)
    for kind, helptext in (
        ("when", "when do these agents complete the task"),
        ("whynot", "why did these agents not complete the task under given conditions"),
        ("what", "what happens after the task"),
    ):
        q = esub.add_parser(kind, help=helptext)
        _corpus_options(q)
        q.add_argument("--task", required=True)
        q.add_argument("--format", choices=("text", "json"), default="text")
        q.add_argument("--seed", type=int, help=argparse.SUPPRESS)
        if kind == "what":
            continue
        q.add_argument("--agents", type=_int_list, required=True, metavar="IDS")
        q.add_argument("--features", type=_features, help="override relevant features; " + FEATURE_HELP)
        q.add_argument("--match", choices=("exact", "superset"), default="exact",
                       help="how the agent group must match the completing agents")
        if kind == "when":
            q.add_argument("--nontargets", choices=("matching", "all"), default="matching",
                           help="draw non-target states from matching diagrams only, or from all")
        else:
            q.add_argument("--given", type=_features, help="conditions already met; " + FEATURE_HELP)
    e.set_defaults(func=cmd_explain)

    st = sub.add_parser("stats", help="corpus size statistics")
    _corpus_options(st)
    st.add_argument("--baseline", action="store_true", help="include per-agent prefix-tree sizes")
    st.add_argument("--timing", action="store_true", help="report summarization wall-clock time")
    st.add_argument("--format", choices=("text", "json"), default="text")
    st.add_argument("--seed", type=int, help=argparse.SUPPRESS)
    st.set_defaults(func=cmd_stats)

    x = sub.add_parser("export-dot", help="render one episode's diagram")
    _corpus_options(x)
    x.add_argument("--episode", help="episode id (default: the first one)")
    x.add_argument("--format", choices=("dot", "json"), default="dot")
    x.add_argument("--seed", type=int, help=argparse.SUPPRESS)
    x.set_defaults(func=cmd_export_dot)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HasseExplainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ParseError.exit_code
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
