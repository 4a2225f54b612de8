"""Command-line front end.

Results go to stdout, one canonical key per line, followed by a
``TRUNCATED`` line when a budget pruned the search. Diagnostics go to
stderr. Exit status: 0 success, 1 property false / dead derivation,
2 parse, validation or budget error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import closure
from .control import accepts, words_up_to
from .engine import EnumLimits, derive_word, enumerate_language, sample_derivation
from .errors import DeadEnd, GrammarToolError
from .grammar import Grammar, parse_grammar_file, serialize_grammar
from .graph import GraphSet, canonical_key, to_dot, underlying

TRUNCATED = "TRUNCATED"
DEFAULT_LIMITS = EnumLimits(max_word_len=5, max_nodes=14, max_states=50_000)

COMPOSE_OPS = {
    "union": (closure.union_grammar, 2),
    "dsum": (closure.disjoint_sum_grammar, 2),
    "ksum": (closure.kleene_sum_grammar, 1),
    "chain": (closure.chain_concat_grammar, 2),
    "star": (closure.star_concat_grammar, 1),
}


class _Usage(Exception):
    pass


def _load(path: str) -> Grammar:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc.strerror}") from exc
    return parse_grammar_file(text)


def _limits(args) -> EnumLimits:
    return EnumLimits(
        max_word_len=args.max_word,
        max_nodes=args.max_nodes,
        max_states=args.max_states,
    )


def _emit(graphs: GraphSet, out, dot_dir: str | None) -> None:
    for key in graphs.keys():
        print(key.decode(), file=out)
    if graphs.truncated:
        print(TRUNCATED, file=out)
    if dot_dir:
        target = Path(dot_dir)
        target.mkdir(parents=True, exist_ok=True)
        for i, g in enumerate(graphs):
            (target / f"g{i:04d}.dot").write_text(to_dot(g), encoding="utf-8")


def _add_limit_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-word", type=int, default=DEFAULT_LIMITS.max_word_len)
    p.add_argument("--max-nodes", type=int, default=DEFAULT_LIMITS.max_nodes)
    p.add_argument("--max-states", type=int, default=DEFAULT_LIMITS.max_states)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncence", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and validate a grammar file")
    p.add_argument("file")

    p = sub.add_parser("words", help="list control words up to a length")
    p.add_argument("file")
    p.add_argument("--max-len", type=int, required=True)

    p = sub.add_parser("derive", help="apply a word of productions to the start graph")
    p.add_argument("file")
    p.add_argument("--word", required=True, help='space separated production names, e.g. "p1 p1 p2"')
    p.add_argument("--all", action="store_true", help="also report nonterminal results")
    p.add_argument("--dot", metavar="DIR")
    p.add_argument("--max-nodes", type=int, default=DEFAULT_LIMITS.max_nodes)
    p.add_argument("--max-states", type=int, default=DEFAULT_LIMITS.max_states)

    p = sub.add_parser("sample", help="one random derivation")
    p.add_argument("file")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--dot", metavar="DIR")
    _add_limit_flags(p)

    p = sub.add_parser("enum", help="bounded language enumeration")
    p.add_argument("file")
    _add_limit_flags(p)
    p.add_argument("--underlying", action="store_true")
    p.add_argument("--dot", metavar="DIR")

    p = sub.add_parser("compose", help="build a closure grammar")
    p.add_argument("--op", choices=sorted(COMPOSE_OPS), required=True)
    p.add_argument("inputs", nargs="+")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("eq", help="bounded language equality up to isomorphism")
    p.add_argument("a")
    p.add_argument("b")
    _add_limit_flags(p)
    p.add_argument(
        "--max-word-b", type=int, default=None, help="word bound for B (default: --max-word)"
    )
    p.add_argument("--underlying", action="store_true")
    return parser


def _cmd_check(args, out, err) -> int:
    g = _load(args.file)
    print(f"ok {g.name}: {len(g.productions)} productions", file=out)
    return 0


def _cmd_words(args, out, err) -> int:
    g = _load(args.file)
    words = words_up_to(g.control, args.max_len)
    for w in sorted(words, key=lambda w: (len(w), w)):
        print(" ".join(w) if w else "eps", file=out)
    return 0


def _cmd_derive(args, out, err) -> int:
    g = _load(args.file)
    word = args.word.split()
    unknown = [w for w in word if w not in g.productions]
    if unknown:
        raise _Usage(f"unknown production(s): {', '.join(unknown)}")
    if not accepts(g.control, word):
        print("warning: word is not in the control language", file=err)
    limits = EnumLimits(max_word_len=max(len(word), 1), max_nodes=args.max_nodes, max_states=args.max_states)
    result = derive_word(g.start, g, word, limits)
    if not args.all:
        kept = GraphSet(truncated=result.truncated)
        for key, h in result.items():
            if g.is_terminal_graph(h):
                kept.add(h, key)
        result = kept
    _emit(result, out, args.dot)
    print(f"{len(result)} graph(s)", file=err)
    return 0 if len(result) else 1


def _cmd_sample(args, out, err) -> int:
    g = _load(args.file)
    try:
        word, h = sample_derivation(g, args.seed, _limits(args))
    except DeadEnd as exc:
        print(f"dead end: {exc}", file=err)
        return 1
    print(" ".join(word) if word else "eps", file=out)
    print(canonical_key(h).decode(), file=out)
    if args.dot:
        Path(args.dot).mkdir(parents=True, exist_ok=True)
        (Path(args.dot) / "sample.dot").write_text(to_dot(h), encoding="utf-8")
    return 0


def _cmd_enum(args, out, err) -> int:
    g = _load(args.file)
    result = enumerate_language(g, _limits(args))
    if args.underlying:
        result = result.map(underlying)
    _emit(result, out, args.dot)
    flag = " (truncated)" if result.truncated else ""
    print(f"{len(result)} graph(s){flag}", file=err)
    return 0


def _cmd_compose(args, out, err) -> int:
    fn, arity = COMPOSE_OPS[args.op]
    if len(args.inputs) != arity:
        raise _Usage(f"--op {args.op} takes {arity} grammar file(s)")
    grammars = [_load(p) for p in args.inputs]
    result = fn(*grammars)
    Path(args.output).write_text(serialize_grammar(result), encoding="utf-8")
    print(f"wrote {args.output}: {len(result.productions)} productions", file=err)
    return 0


def _cmd_eq(args, out, err) -> int:
    ga, gb = _load(args.a), _load(args.b)
    la = _limits(args)
    lb = EnumLimits(
        max_word_len=args.max_word if args.max_word_b is None else args.max_word_b,
        max_nodes=args.max_nodes,
        max_states=args.max_states,
    )
    a, b = enumerate_language(ga, la), enumerate_language(gb, lb)
    if args.underlying:
        a, b = a.map(underlying), b.map(underlying)
    only_a = sorted(set(a.keys()) - set(b.keys()))
    only_b = sorted(set(b.keys()) - set(a.keys()))
    for key in only_a:
        print(f"only in A: {key.decode()}", file=err)
    for key in only_b:
        print(f"only in B: {key.decode()}", file=err)
    if a.truncated or b.truncated:
        print(TRUNCATED, file=out)
    equal = not only_a and not only_b
    print("equal" if equal else "different", file=out)
    return 0 if equal else 1


COMMANDS = {
    "check": _cmd_check,
    "words": _cmd_words,
    "derive": _cmd_derive,
    "sample": _cmd_sample,
    "enum": _cmd_enum,
    "compose": _cmd_compose,
    "eq": _cmd_eq,
}


def run_cli(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return COMMANDS[args.command](args, out, err)
    except (GrammarToolError, _Usage, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return 2


def main() -> None:
    sys.exit(run_cli())
