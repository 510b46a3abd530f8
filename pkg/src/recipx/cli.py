"""``recipx`` command-line entry point.

Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib import resources
from pathlib import Path
from typing import Sequence

from recipx import explain as ex
from recipx import sim
from recipx.model import (
    AttributeSchema,
    ConfigError,
    DatasetError,
    SynthConfig,
    dumps,
    generate_population,
    load_dataset,
)

log = logging.getLogger("recipx")

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which we reserve for I/O
        raise UsageError(message)


def bundled_fixture() -> Path:
    """Path of the shipped two-attribute Bob/Alice dataset."""
    return Path(str(resources.files("recipx").joinpath("data/bob_alice.jsonl")))


def _choice(value: str, allowed: Sequence[str], what: str) -> str:
    if value not in allowed:
        raise UsageError(f"unknown {what} {value!r} (expected one of {', '.join(allowed)})")
    return value


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def cmd_generate(args: argparse.Namespace) -> int:
    kwargs = {}
    if args.schema:
        data = json.loads(Path(args.schema).read_text(encoding="utf-8"))
        try:
            kwargs["schema"] = AttributeSchema.from_dict(data)
        except (KeyError, TypeError) as e:
            raise ConfigError(f"bad schema file: {e}") from None
    if args.views:
        kwargs["views_range"] = tuple(args.views)
    if args.messages:
        kwargs["messages_range"] = tuple(args.messages)
    config = SynthConfig(
        n_users=args.users, n_archetypes=args.archetypes, concentration=args.concentration, **kwargs
    )
    snapshot = generate_population(config, args.seed)
    _write(args.out, dumps(snapshot))
    print(
        f"wrote {len(snapshot.users)} users, {len(snapshot.log.views)} views, "
        f"{len(snapshot.log.messages)} messages to {args.out}"
    )
    return EXIT_OK


def cmd_recommend(args: argparse.Namespace) -> int:
    snapshot = load_dataset(args.data or bundled_fixture())
    recommender = _choice(args.recommender, ex.RECOMMENDERS, "recommender")
    method = _choice(args.method, ex.METHODS, "method")
    mode = _choice(args.mode, ex.MODES, "mode")
    style = _choice(args.style, ex.STYLES, "style")
    ers = ex.recommend_with_explanations(args.user, args.count, recommender, method, mode, snapshot, args.k)
    if args.format == "json":
        print(json.dumps([er.to_dict() for er in ers], indent=2))
    else:
        phrases = ex.load_phrases(args.phrases)
        for rank, er in enumerate(ers, 1):
            sys.stdout.write(f"{rank}. " + ex.render(er, style, phrases))
    return EXIT_OK


def cmd_explain(args: argparse.Namespace) -> int:
    snapshot = load_dataset(args.data or bundled_fixture())
    method = _choice(args.method, ex.METHODS, "method")
    mode = _choice(args.mode, ex.MODES, "mode")
    style = _choice(args.style, ex.STYLES, "style")
    recommender = _choice(args.recommender, ex.RECOMMENDERS, "recommender")
    er = ex.explain_pair(args.from_user, args.to_user, method, mode, snapshot, args.k, recommender)
    if args.format == "json":
        print(json.dumps(er.to_dict(), indent=2))
    else:
        sys.stdout.write(ex.render(er, style, ex.load_phrases(args.phrases)))
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    config = sim.load_config(args.config)
    snapshot = load_dataset(args.data)
    report = sim.run_experiment(
        snapshot,
        config.conditions,
        config.cost,
        config.policy,
        config.recs_per_user,
        config.seed,
        k=config.k,
        workers=args.workers,
        design=config.design,
    )
    _write(args.out, sim.report_csv(report))
    sys.stdout.write(sim.format_table(report))
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    report = sim.read_report_csv(Path(args.csv).read_text(encoding="utf-8"))
    if args.format == "json":
        print(json.dumps({
            "conditions": [vars(c) for c in report.conditions],
            "pairs": [vars(p) for p in report.pairs],
        }, indent=2))
    else:
        sys.stdout.write(sim.format_table(report))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="recipx", description="Reciprocal recommendations with explanations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a seeded synthetic dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--users", type=int, default=118)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--schema", help="JSON file with an 'attributes' list")
    p.add_argument("--archetypes", type=int, default=4)
    p.add_argument("--concentration", type=float, default=0.5)
    p.add_argument("--views", type=int, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--messages", type=int, nargs=2, metavar=("LO", "HI"))
    p.set_defaults(func=cmd_generate)

    def explain_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--data", help="dataset file (default: bundled Bob/Alice fixture)")
        p.add_argument("--method", default="correlation")
        p.add_argument("--mode", default="reciprocal")
        p.add_argument("-k", type=int, default=ex.DEFAULT_K)
        p.add_argument("--style", default="full")
        p.add_argument("--recommender", default="recon")
        p.add_argument("--phrases", help="phrase table (key = phrase per line)")
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("recommend", help="top recommendations for one user, explained")
    p.add_argument("--user", required=True)
    p.add_argument("--count", type=int, default=5)
    explain_flags(p)
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("explain", help="explain one (receiver, recommended) pair")
    p.add_argument("--from", dest="from_user", required=True)
    p.add_argument("--to", dest="to_user", required=True)
    explain_flags(p)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("simulate", help="run a seeded cost experiment")
    p.add_argument("--data", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="summarise a report CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    level = os.environ.get("RECIPX_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR), format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        log.info("running %s", args.command)
        return args.func(args)
    except OSError as e:
        print(f"recipx: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, DatasetError, ConfigError, sim.ConfigError, ValueError) as e:
        print(f"recipx: error: {e}", file=sys.stderr)
        return EXIT_INVALID


def entry() -> None:
    sys.exit(main())
