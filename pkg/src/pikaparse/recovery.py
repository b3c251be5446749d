"""Syntax error recovery from a filled memo table.

The bottom-up fill records every match of every clause, whether or not the
start rule succeeds, so recovery is a read-only query: the regions of the
input not covered by any match of the rules of interest are the syntax
error regions, and parsing effectively resumes at the next recorded match
after each error.

Per-clause match positions are recorded in descending order during the
right-to-left fill, so next_match_after is a binary search, not a scan.
"""
from __future__ import annotations

from bisect import bisect_right
from typing import NamedTuple

from .engine import MemoTable


class ErrorSpan(NamedTuple):
    """A half-open input region [start, end) no rule of interest matched."""

    start: int
    end: int

    def slice(self, text: str) -> str:
        return text[self.start : self.end]


def _clauses_of_interest(table: MemoTable, rule_names):
    g = table.grammar
    if rule_names is None:
        names = [g.start_rule]
    elif isinstance(rule_names, str):
        names = [rule_names]
    else:
        names = list(rule_names)
    seen = set()
    out = []
    for n in names:
        c = g.rule_clause(n)
        if id(c) not in seen:
            seen.add(id(c))
            out.append(c)
    return out


def find_error_spans(table: MemoTable, rule_names=None) -> list[ErrorSpan]:
    """Uncovered regions of the input, in order.

    A position is covered when any non-empty stored match of any rule of
    interest (default: the start rule) spans it.  An input the start rule
    fully matches yields no spans; an input nothing matches yields one span
    covering everything.
    """
    n = len(table.text)
    if n == 0:
        return []
    intervals = []
    for clause in _clauses_of_interest(table, rule_names):
        tbl_positions = table.match_positions(clause)
        for pos in tbl_positions:
            m = table.stored(clause, pos)
            if m is not None and m.len > 0:
                intervals.append((pos, pos + m.len))
    if not intervals:
        return [ErrorSpan(0, n)]
    intervals.sort()
    spans = []
    cursor = 0
    for start, end in intervals:
        if start > cursor:
            spans.append(ErrorSpan(cursor, start))
        if end > cursor:
            cursor = end
    if cursor < n:
        spans.append(ErrorSpan(cursor, n))
    return spans


def next_match_after(table: MemoTable, rule_name: str, pos: int, min_len: int = 1):
    """Earliest stored match of rule_name starting at or after pos.

    Binary search over the descending position list; returns a Match or
    None.  min_len filters out degenerate matches (zero-length by default).
    """
    clause = table.grammar.rule_clause(rule_name)
    positions = table.match_positions(clause)
    # positions is descending; entries >= pos form a prefix.
    j = bisect_right(positions, -pos, key=lambda p: -p)
    for i in range(j - 1, -1, -1):
        m = table.stored(clause, positions[i])
        if m is not None and m.len >= min_len:
            return m
    return None


def covering_matches(table: MemoTable, rule_names=None, min_len: int = 1):
    """Greedy left-to-right sequence of non-overlapping matches.

    At each offset, the match of any rule of interest with the earliest
    start at or after the offset wins, longest match breaking ties; the
    walk then resumes at its end.  These are the recovered islands around
    the error spans.
    """
    clauses = _clauses_of_interest(table, rule_names)
    n = len(table.text)
    out = []
    cursor = 0
    while cursor < n:
        best = None
        for clause in clauses:
            positions = table.match_positions(clause)
            j = bisect_right(positions, -cursor, key=lambda p: -p)
            for i in range(j - 1, -1, -1):
                m = table.stored(clause, positions[i])
                if m is not None and m.len >= min_len:
                    if best is None or (m.pos, -m.len) < (best.pos, -best.len):
                        best = m
                    break
        if best is None:
            break
        out.append(best)
        cursor = best.pos + best.len
    return out
