"""Command-line front end.

Subcommands:

- ``typecheck TERM``: print every canonical type of a combinator term.
- ``derive SENTENCE``: search shift decorations of a bracketed sentence or
  ``.``-separated discourse and print each reading.
- ``eval INPUT --model FILE``: evaluate a term or sentence on a model and
  print the truth value, antecedent table, or referent listing.
- ``check SPEC``: compare a shipped sentence against its brute-force
  first-order truth condition over an exhaustive or random model suite.
- ``models``: stream the model suite for a signature.

Exit codes: 0 success (derivations found, nonempty type set, zero
mismatches); 1 a clean negative result; 2 usage, parse, or lexicon errors;
3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .checks import CheckError, run_check
from .combinators import (
    TermError,
    UnknownLexemeError,
    format_term,
    parse_term,
    typecheck,
)
from .derivation import (
    SearchBounds,
    SearchBudgetExceeded,
    parse_discourse,
    search_derivations,
)
from .evaluator import UnsupportedTypeError, eval_resolved, eval_term, observe
from .lexicon import Lexicon, LexiconError, default_lexicon, load_lexicon
from .model import ModelError, load_model
from .oracle import (
    SENTENCE_SPECS,
    OracleError,
    enumerate_models,
)
from .types import TypeError_, format_type, parse_type

LEXICON_ENV = "DONKEYKIT_LEXICON"

EXIT_OK = 0
EXIT_EMPTY = 1
EXIT_ERROR = 2
EXIT_BUDGET = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="donkeykit",
        description="typed-combinator engine for dynamic-semantics readings",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, bounds: bool = False) -> None:
        p.add_argument("--lexicon", help=f"lexicon file (default ${LEXICON_ENV} or built-in)")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if bounds:
            p.add_argument("--max-index", type=int, default=2,
                           help="cap on shift family indices (default 2)")
            p.add_argument("--max-shifts", type=int, default=3,
                           help="cap on shifts per node (default 3)")
            p.add_argument("--allow-s", action="store_true",
                           help="enable the mirror-image binding shift")
            p.add_argument("--budget", type=int, default=500_000,
                           help="search candidate budget")

    p = sub.add_parser("typecheck", help="type a combinator term")
    p.add_argument("term")
    common(p)

    p = sub.add_parser("derive", help="search readings of a bracketed sentence")
    p.add_argument("sentence")
    p.add_argument("--target", help="keep only readings unifying with this type")
    p.add_argument("--all", action="store_true",
                   help="keep extensionally duplicate derivations")
    common(p, bounds=True)

    p = sub.add_parser("eval", help="evaluate a term or sentence on a model")
    p.add_argument("input", help="a (term) or a [bracketed sentence]")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--target", help="reading type to select")
    p.add_argument("--index", type=int,
                   help="choose among multiple readings (0-based)")
    common(p, bounds=True)

    p = sub.add_parser("check", help="compare engine and first-order oracle")
    p.add_argument("spec", help="one of: " + ", ".join(sorted(SENTENCE_SPECS)))
    p.add_argument("--max-size", type=int, default=2)
    p.add_argument("--exhaustive", action="store_true",
                   help="every model up to --max-size (the default mode)")
    p.add_argument("--random", type=int, metavar="N",
                   help="N seeded random models of size --max-size")
    p.add_argument("--seed", type=int, default=0)
    common(p, bounds=True)

    p = sub.add_parser("models", help="stream a model suite")
    p.add_argument("--pred", default="", help="comma-separated predicate names")
    p.add_argument("--rel", default="", help="comma-separated relation names")
    p.add_argument("--max-size", type=int, default=2)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--random", type=int, metavar="N")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    return parser


def _load_lexicon(args) -> Lexicon:
    path = args.lexicon or os.environ.get(LEXICON_ENV)
    return load_lexicon(path) if path else default_lexicon()


def _bounds(args) -> SearchBounds:
    return SearchBounds(
        max_index=args.max_index,
        max_shifts_per_node=args.max_shifts,
        allow_s=args.allow_s,
        budget=args.budget,
    )


def _emit(data, as_json: bool, text: str) -> None:
    if as_json:
        print(json.dumps(data, sort_keys=True))
    else:
        print(text)


def _cmd_typecheck(args) -> int:
    lexicon = _load_lexicon(args)
    term = parse_term(args.term)
    types = typecheck(term, lexicon)
    if args.json:
        print(json.dumps({"term": format_term(term),
                          "types": [format_type(t) for t in types]}, sort_keys=True))
    else:
        for t in types:
            print(format_type(t))
    return EXIT_OK if types else EXIT_EMPTY


def _cmd_derive(args) -> int:
    lexicon = _load_lexicon(args)
    tree = parse_discourse(args.sentence)
    target = parse_type(args.target) if args.target else None
    derivations = search_derivations(
        tree, lexicon, _bounds(args), target=target, dedup=not args.all)
    if args.json:
        print(json.dumps([d.to_json() for d in derivations], sort_keys=True))
    else:
        for d in derivations:
            r = d.reading
            print(f"{format_term(d.term)} : {format_type(d.ty)}"
                  f"  [in={list(r.residual_in)} out={list(r.residual_out)}"
                  f" z={r.z_count} s={r.s_count}]")
    return EXIT_OK if derivations else EXIT_EMPTY


def _cmd_eval(args) -> int:
    lexicon = _load_lexicon(args)
    model = load_model(args.model)
    text = args.input.strip()
    if text.startswith("["):
        tree = parse_discourse(text)
        target = parse_type(args.target) if args.target else None
        derivations = search_derivations(tree, lexicon, _bounds(args), target=target)
        if not derivations:
            print("no readings", file=sys.stderr)
            return EXIT_EMPTY
        if len(derivations) > 1 and args.index is None:
            print("ambiguous: choose a reading with --index", file=sys.stderr)
            for i, d in enumerate(derivations):
                print(f"  --index {i}: {format_term(d.term)} : {format_type(d.ty)}",
                      file=sys.stderr)
            return EXIT_ERROR
        derivation = derivations[args.index or 0]
        resolved = derivation.resolved()
        obs = observe(eval_resolved(resolved, model, lexicon), resolved.ty, model)
    else:
        term = parse_term(text)
        types = typecheck(term, lexicon)
        if not types:
            print("term is ill-typed", file=sys.stderr)
            return EXIT_EMPTY
        if len(types) > 1 and args.index is None:
            print("ambiguous: choose a type with --index", file=sys.stderr)
            for i, t in enumerate(types):
                print(f"  --index {i}: {format_type(t)}", file=sys.stderr)
            return EXIT_ERROR
        ty = types[args.index or 0]
        obs = observe(eval_term(term, ty, model, lexicon), ty, model)
    print(json.dumps(obs.to_json(), sort_keys=True))
    return EXIT_OK


def _cmd_check(args) -> int:
    if args.spec not in SENTENCE_SPECS:
        print(f"unknown spec {args.spec!r}; known: {', '.join(sorted(SENTENCE_SPECS))}",
              file=sys.stderr)
        return EXIT_ERROR
    spec = SENTENCE_SPECS[args.spec]
    lexicon = _load_lexicon(args)
    report = run_check(
        spec,
        lexicon,
        bounds=_bounds(args),
        max_size=args.max_size,
        random_count=args.random,
        seed=args.seed,
    )
    if args.json:
        print(json.dumps(report.to_json(), sort_keys=True))
    else:
        status = "PASS" if report.passed else "FAIL"
        print(f"{args.spec}: {status} checked={report.checked}"
              f" mismatches={report.mismatch_count}")
        for m in report.mismatches[:5]:
            print(f"  model={json.dumps(m['model'], sort_keys=True)}"
                  f" engine={m['engine']} oracle={m['oracle']}")
    return EXIT_OK if report.passed else EXIT_EMPTY


def _cmd_models(args) -> int:
    preds = tuple(p for p in args.pred.split(",") if p)
    rels = tuple(r for r in args.rel.split(",") if r)
    count = 0
    for model in enumerate_models(
            preds, rels, args.max_size, random_count=args.random, seed=args.seed):
        print(json.dumps(model.to_json(), sort_keys=True))
        count += 1
    print(f"# {count} models", file=sys.stderr)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "typecheck": _cmd_typecheck,
        "derive": _cmd_derive,
        "eval": _cmd_eval,
        "check": _cmd_check,
        "models": _cmd_models,
    }
    try:
        return handlers[args.command](args)
    except SearchBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (TermError, TypeError_, LexiconError, ModelError, OracleError,
            CheckError, UnknownLexemeError, UnsupportedTypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
