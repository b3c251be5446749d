"""Top-down memoized reference parser.

This is the classic recursive packrat evaluator.  It shares the per-kind
matching semantics with the bottom-up engine (engine.match_clause), so the
two differ only in evaluation strategy; comparing their results exercises
exactly the bottom-up machinery: fill order, seeding, match improvement,
and zero-length synthesis.

The evaluator cannot handle left recursion, so it statically rejects
grammars where a clause can reach itself without consuming input.  The
memo is write-once: each (clause, position) is evaluated at most once, and
failures are memoized as None.
"""
from __future__ import annotations

import sys
import threading
from typing import NamedTuple

from .clauses import First, NotFollowedBy, OneOrMore, Seq
from .engine import Match, match_clause
from .grammar import Grammar


class LeftRecursionError(ValueError):
    """Raised when the reference parser meets a left-recursive grammar."""


def _same_position_subs(clause):
    """Subclauses evaluation can reach without consuming any input."""
    kind = type(clause)
    if kind is Seq:
        out = []
        for s in clause.sub_clauses:
            out.append(s)
            if not s.can_match_zero_chars:
                break
        return out
    if kind is First:
        return list(clause.sub_clauses)
    if kind is OneOrMore or kind is NotFollowedBy:
        return list(clause.sub_clauses)
    return []


def ensure_no_left_recursion(grammar: Grammar, start_clause=None):
    """Raise LeftRecursionError if evaluation from the start clause could
    revisit a clause at the same input position."""
    root = start_clause if start_clause is not None else grammar.start_clause
    on_path = set()
    finished = set()
    stack = [(root, iter(_same_position_subs(root)))]
    on_path.add(root)
    path = [root]
    while stack:
        node, it = stack[-1]
        pushed = False
        for sub in it:
            if sub in on_path:
                i = path.index(sub)
                cycle = path[i:]
                name = next(
                    (grammar.clause_name(c) for c in cycle
                     if grammar.clause_name(c) is not None),
                    None,
                )
                where = "rule %r" % name if name else "clause %r" % sub
                raise LeftRecursionError(
                    "grammar is left recursive through %s; the top-down "
                    "reference parser cannot evaluate it" % where
                )
            if sub not in finished:
                on_path.add(sub)
                path.append(sub)
                stack.append((sub, iter(_same_position_subs(sub))))
                pushed = True
                break
        if not pushed:
            on_path.discard(node)
            path.pop()
            finished.add(node)
            stack.pop()


class OracleResult(NamedTuple):
    match: object
    memo: dict


_BUSY = object()


def packrat_parse(grammar: Grammar, text: str, check_left_recursion: bool = True) -> OracleResult:
    """Parse text top-down from the grammar's start rule.

    Returns the best match at position 0 (None on failure) and the complete
    memo of every evaluation performed.  Suited to test-scale inputs: the
    evaluator recurses, so it raises the interpreter recursion limit in
    proportion to input length.
    """
    start = grammar.start_clause
    if check_left_recursion:
        ensure_no_left_recursion(grammar, start)
    memo = {}

    def evaluate(clause, pos):
        key = (clause.clause_idx, pos)
        if key in memo:
            hit = memo[key]
            if hit is _BUSY:
                desc = repr(clause)
                if len(desc) > 80:
                    desc = desc[:77] + "..."
                raise LeftRecursionError(
                    "left recursion at position %d through %s" % (pos, desc)
                )
            return hit
        memo[key] = _BUSY
        m = match_clause(clause, pos, text, evaluate)
        memo[key] = m
        return m

    needed = min(1_000_000, 8 * len(text) + 8 * len(grammar.all_clauses) + 2000)
    m = _call_with_frame_budget(lambda: evaluate(start, 0), needed)
    return OracleResult(m, memo)


def _call_with_frame_budget(fn, frames):
    """Call fn with room for the given number of interpreter frames.

    Raising the recursion limit alone is not enough: past a few thousand
    frames the interpreter exhausts the C stack and dies instead of raising
    RecursionError.  Deep calls therefore run on a worker thread created
    with a stack sized for the budget.
    """
    old_limit = sys.getrecursionlimit()
    if frames <= min(old_limit, 5000):
        return fn()
    outcome = []

    def runner():
        sys.setrecursionlimit(frames)
        try:
            outcome.append((True, fn()))
        except BaseException as exc:
            outcome.append((False, exc))
        finally:
            sys.setrecursionlimit(old_limit)

    old_stack = threading.stack_size()
    threading.stack_size(min(512 * 1024 * 1024, max(32 * 1024 * 1024, 4096 * frames)))
    try:
        worker = threading.Thread(target=runner, name="deep-eval")
        worker.start()
    finally:
        threading.stack_size(old_stack)
    worker.join()
    ok, value = outcome[0]
    if not ok:
        raise value
    return value


def same_shape(a, b) -> bool:
    """Structural equality of two match trees.

    Zero-length matches compare as leaves: the bottom-up engine synthesizes
    them childless on lookup, while the top-down evaluator builds them with
    children, and the two spellings mean the same empty derivation.
    """
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is None or y is None:
            if x is not y:
                return False
            continue
        if x.clause is not y.clause or x.pos != y.pos or x.len != y.len:
            return False
        if x.len == 0:
            continue
        if type(x.clause) is First and x.alt_idx != y.alt_idx:
            return False
        if len(x.sub_matches) != len(y.sub_matches):
            return False
        stack.extend(zip(x.sub_matches, y.sub_matches))
    return True


def describe_match(m, limit: int = 60) -> str:
    """Compact one-line rendering of a match tree, for assertion messages."""
    if m is None:
        return "None"
    out = []
    stack = [m]
    while stack:
        if len(out) >= limit:
            out.append("...")
            break
        node = stack.pop()
        out.append(
            "%s[%d,%d)" % (type(node.clause).__name__, node.pos, node.pos + node.len)
        )
        stack.extend(reversed(node.sub_matches))
    return " ".join(out)
