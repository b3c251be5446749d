"""Command line interface.

    pikaparse parse -g grammar.peg input.txt
    pikaparse gen --count 50 --max-depth 10
    pikaparse bench --count 40 -o results.csv

Exit codes: 0 success, 1 input did not fully parse, 2 bad usage or a bad
grammar.

All tree serializers build output iteratively: parse trees of deeply nested
inputs (a long left-nested sum, say) exceed any recursive serializer's
stack, including the one inside json.dumps.
"""
from __future__ import annotations

import argparse
import json
import sys

from .bench import (
    expression_grammar,
    fit_records,
    gen_expressions,
    run_bench,
    write_csv,
)
from .clauses import GrammarError
from .engine import parse
from .metagrammar import compile_grammar
from .recovery import covering_matches, find_error_spans
from .tree import extract_parse_tree, to_ast


# ---------------------------------------------------------------------------
# serializers (all iterative; see module docstring)

def tree_lines(node, max_text: int = 40):
    """Indented text rendering, one line per node."""
    lines = []
    stack = [(node, 0)]
    while stack:
        n, depth = stack.pop()
        name = _name_of(n)
        head = "%s:" % n.label if n.label and n.label != name else ""
        snippet = ""
        if not n.children:
            t = n.text
            if len(t) > max_text:
                t = t[: max_text - 3] + "..."
            snippet = " %s" % json.dumps(t)
        lines.append(
            "%s%s%s [%d,%d)%s" % ("  " * depth, head, name, n.pos, n.end, snippet)
        )
        stack.extend((c, depth + 1) for c in reversed(n.children))
    return lines


def _name_of(node):
    # ASTNode has no clause name; fall back to its label.
    return getattr(node, "name", None) or node.label or "ast"


def tree_to_json(node) -> str:
    """Compact JSON: name, label, start, end, children; text on leaves."""
    out = []
    stack = [("node", node)]
    while stack:
        kind, v = stack.pop()
        if kind == "lit":
            out.append(v)
            continue
        parts = [
            '{"name":%s' % json.dumps(_name_of(v)),
            ',"label":%s' % json.dumps(v.label),
            ',"start":%d,"end":%d' % (v.pos, v.end),
        ]
        if not v.children:
            parts.append(',"text":%s' % json.dumps(v.text))
        parts.append(',"children":[')
        out.append("".join(parts))
        stack.append(("lit", "]}"))
        tail = []
        for i, c in enumerate(v.children):
            if i:
                tail.append(("lit", ","))
            tail.append(("node", c))
        stack.extend(reversed(tail))
    return "".join(out)


def tree_to_sexpr(node) -> str:
    """S-expression rendering: (name child ...) with quoted leaf text."""
    out = []
    stack = [("node", node)]
    while stack:
        kind, v = stack.pop()
        if kind == "lit":
            out.append(v)
            continue
        name = _name_of(v)
        if v.label and v.label != name:
            name = "%s:%s" % (v.label, name)
        if not v.children:
            out.append("(%s %s)" % (name, json.dumps(v.text)))
            continue
        out.append("(%s" % name)
        stack.append(("lit", ")"))
        tail = []
        for c in v.children:
            tail.append(("lit", " "))
            tail.append(("node", c))
        stack.extend(reversed(tail))
    return "".join(out)


_FORMATS = {
    "tree": lambda n: "\n".join(tree_lines(n)),
    "json": tree_to_json,
    "sexpr": tree_to_sexpr,
}


# ---------------------------------------------------------------------------
# commands

def _load_grammar(args):
    if args.grammar is None:
        return expression_grammar(not args.no_repetition_rewrite)
    with open(args.grammar, "r", encoding="utf-8") as fh:
        text = fh.read()
    return compile_grammar(
        text,
        start_rule=args.start,
        rewrite_repetitions=not args.no_repetition_rewrite,
    )


def _read_input(args) -> str:
    if args.text is not None:
        return args.text
    if args.input is None or args.input == "-":
        data = sys.stdin.read()
    else:
        with open(args.input, "r", encoding="utf-8") as fh:
            data = fh.read()
    if not args.keep_trailing_newline and data.endswith("\n"):
        data = data[:-1]
    return data


def _cmd_parse(args) -> int:
    grammar = _load_grammar(args)
    text = _read_input(args)
    table = parse(grammar, text)
    if table.matched_whole():
        root = extract_parse_tree(table)
        if args.ast:
            root = to_ast(root)
            if root is None:
                print("(no labeled nodes)")
                return 0
        print(_FORMATS[args.format](root))
        return 0
    names = args.recover.split(",") if args.recover else None
    spans = find_error_spans(table, names)
    print("input does not fully match rule %r" % grammar.start_rule)
    print("error spans:")
    if not spans:
        # Everything is covered by some match, yet no single start-rule
        # match spans the whole input.
        print("  (none: matches cover the input but do not join up)")
    for s in spans:
        print("  [%d,%d) %s" % (s.start, s.end, json.dumps(s.slice(text))))
    islands = covering_matches(table, names)
    if islands:
        print("matched before/after/between:")
        for m in islands:
            t = text[m.pos : m.pos + m.len]
            if len(t) > 40:
                t = t[:37] + "..."
            print(
                "  %s [%d,%d) %s"
                % (grammar.node_name(m.clause), m.pos, m.pos + m.len, json.dumps(t))
            )
    return 1


def _cmd_gen(args) -> int:
    exprs = gen_expressions(args.count, args.max_depth, args.seed)
    out = sys.stdout if args.output is None else open(args.output, "w", encoding="utf-8")
    try:
        for e in exprs:
            out.write(e + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _cmd_bench(args) -> int:
    grammar = _load_grammar(args)
    if args.inputs:
        with open(args.inputs, "r", encoding="utf-8") as fh:
            inputs = [line.rstrip("\n") for line in fh if line.strip()]
    else:
        inputs = gen_expressions(args.count, args.max_depth, args.seed)
    engines = args.engines.split(",")
    records = run_bench(grammar, inputs, engines=engines, repeats=args.repeats)
    out = sys.stdout if args.output is None else open(args.output, "w", encoding="utf-8")
    try:
        write_csv(records, out)
    finally:
        if out is not sys.stdout:
            out.close()
    for engine in engines:
        lengths = {r.input_length for r in records if r.engine == engine}
        if len(lengths) >= 3:
            fit = fit_records(records, engine)
            print(
                "# %s: time ~ n^%.3f (r^2=%.3f) over %d inputs"
                % (engine, fit.exponent, fit.r_squared, len(inputs)),
                file=sys.stderr,
            )
    return 0


def _add_grammar_opts(sp):
    sp.add_argument("-g", "--grammar", help="grammar file (default: built-in expression grammar)")
    sp.add_argument("-s", "--start", help="start rule (default: first rule)")
    sp.add_argument(
        "--no-oneormore-rewrite",
        "--no-repetition-rewrite",
        dest="no_repetition_rewrite",
        action="store_true",
        help="keep greedy repetitions instead of rewriting them to right-recursive chains",
    )


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pikaparse",
        description="Bottom-up packrat parsing: left recursion and error recovery included.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse input and print its tree")
    _add_grammar_opts(p)
    p.add_argument("input", nargs="?", help="input file, - for stdin (default)")
    p.add_argument("-t", "--text", help="inline input text instead of a file")
    p.add_argument(
        "-f", "--format", choices=sorted(_FORMATS), default="tree",
        help="tree output format (default: tree)",
    )
    p.add_argument("--ast", action="store_true", help="print the labeled AST instead of the parse tree")
    p.add_argument(
        "--recover",
        metavar="RULES",
        help="comma-separated rules of interest for error reporting (default: the start rule)",
    )
    p.add_argument(
        "--keep-trailing-newline",
        action="store_true",
        help="do not strip one trailing newline from the input",
    )
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("gen", help="generate a random expression corpus")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--max-depth", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="write to a file instead of stdout")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bench", help="time parses and write a CSV")
    _add_grammar_opts(p)
    p.add_argument("--inputs", help="file with one input per line (default: generated corpus)")
    p.add_argument("--count", type=int, default=40)
    p.add_argument("--max-depth", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument(
        "--engines",
        default="bottomup",
        help="comma-separated: bottomup, topdown (default: bottomup)",
    )
    p.add_argument("-o", "--output", help="CSV file (default: stdout)")
    p.set_defaults(func=_cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_arg_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except GrammarError as exc:
        print("grammar error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
