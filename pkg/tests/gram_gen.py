"""Random grammar and input generator for differential testing.

Builds small grammars over 2 or 3 letter alphabets, pairing each with a
sampler that produces inputs biased toward (near-)matches.  The shapes
are constrained so that a recursive-descent reference parser can handle
everything the bottom-up engine can:

- rule references only point at later rules, except for right recursion
  guarded by a leading terminal, so nothing is left-recursive
- repetition bodies always consume at least one character
- negative lookahead appears only inside a sequence that also contains a
  later input-consuming element, and never creates nullability
- in a choice, every alternative before the last consumes input, so no
  alternative shadows the rest of the list

Those constraints also keep the generated grammars inside the space
where synthesized zero-length matches (the bottom-up engine never stores
them) coincide with what a top-down parse of the same clause would
produce.
"""

import random

from pikaparse.clauses import (
    Char,
    CharSet,
    First,
    NotFollowedBy,
    OneOrMore,
    Optional,
    Rule,
    RuleRef,
    Seq,
    Str,
    ZeroOrMore,
)
from pikaparse.grammar import assemble_grammar

MAX_CLAUSES = 12


class Candidate:
    """A surface clause plus the facts the generator tracks about it."""

    __slots__ = ("clause", "nullable", "size")

    def __init__(self, clause, nullable, size):
        self.clause = clause
        self.nullable = nullable
        self.size = size


def _terminal(rng, alphabet):
    roll = rng.random()
    if roll < 0.45:
        return Candidate(Char(rng.choice(alphabet)), False, 1)
    if roll < 0.75:
        k = rng.randint(1, len(alphabet))
        chars = "".join(sorted(rng.sample(alphabet, k)))
        negated = rng.random() < 0.2
        return Candidate(CharSet.of(chars, negated), False, 1)
    n = rng.randint(2, 3)
    s = "".join(rng.choice(alphabet) for _ in range(n))
    return Candidate(Str(s), False, 1)


def _ref(rng, later, rule_nullable):
    name = rng.choice(later)
    return Candidate(RuleRef(name), rule_nullable[name], 1)


def _node(rng, alphabet, later, rule_nullable, depth, budget):
    """One random candidate, consuming at most budget surface nodes."""
    if depth <= 0 or budget <= 1:
        if later and rng.random() < 0.3:
            return _ref(rng, later, rule_nullable)
        return _terminal(rng, alphabet)
    roll = rng.random()
    sub = lambda b: _node(rng, alphabet, later, rule_nullable, depth - 1, b)
    if roll < 0.28:
        return _terminal(rng, alphabet)
    if roll < 0.40 and later:
        return _ref(rng, later, rule_nullable)
    if roll < 0.60:
        n = rng.randint(2, 3)
        kids, size = [], 1
        for i in range(n):
            c = sub(max(1, (budget - size) // (n - i)))
            kids.append(c)
            size += c.size
        clause = Seq(tuple(k.clause for k in kids))
        return Candidate(clause, all(k.nullable for k in kids), size)
    if roll < 0.78:
        n = rng.randint(2, 3)
        kids, size = [], 1
        for i in range(n):
            c = sub(max(1, (budget - size) // (n - i)))
            while i < n - 1 and c.nullable:
                c = _terminal(rng, alphabet)
            kids.append(c)
            size += c.size
        clause = First(tuple(k.clause for k in kids))
        return Candidate(clause, kids[-1].nullable, size)
    if roll < 0.86:
        body = sub(budget - 1)
        while body.nullable:
            body = _terminal(rng, alphabet)
        kind = OneOrMore if rng.random() < 0.5 else ZeroOrMore
        return Candidate(kind((body.clause,)), kind is ZeroOrMore, body.size + 1)
    if roll < 0.93:
        body = sub(budget - 1)
        while body.nullable:
            body = _terminal(rng, alphabet)
        return Candidate(Optional((body.clause,)), True, body.size + 1)
    # Negative lookahead, kept safe: always followed by a consuming element.
    probe = _terminal(rng, alphabet)
    anchor = sub(max(1, budget - 2))
    while anchor.nullable:
        anchor = _terminal(rng, alphabet)
    clause = Seq((NotFollowedBy((probe.clause,)), anchor.clause))
    return Candidate(clause, False, probe.size + anchor.size + 2)


def _rule_body(rng, alphabet, name, later, rule_nullable, budget):
    body = _node(rng, alphabet, later, rule_nullable, 3, budget)
    if later or rng.random() >= 0.25 or body.nullable:
        return body
    # Right recursion: TAIL <- t TAIL / body, all alternatives consuming.
    guard = _terminal(rng, alphabet)
    rec = Seq((guard.clause, RuleRef(name)))
    clause = First((rec, body.clause))
    return Candidate(clause, False, body.size + guard.size + 3)


def random_rules(rng):
    """A list of surface rules with the start rule first."""
    alphabet = rng.choice(["ab", "abc", "abc"])
    n_rules = rng.randint(1, 3)
    names = ["R%d" % i for i in range(n_rules)]
    rule_nullable = {}
    bodies = {}
    for i in range(n_rules - 1, -1, -1):
        later = names[i + 1 :]
        budget = rng.randint(3, 7) if i == 0 else rng.randint(2, 5)
        cand = _rule_body(rng, alphabet, names[i], later, rule_nullable, budget)
        bodies[names[i]] = cand.clause
        rule_nullable[names[i]] = cand.nullable
    # Drop rules the start rule never reaches, they would fail assembly.
    reachable, stack = set(), [bodies[names[0]]]
    while stack:
        c = stack.pop()
        if isinstance(c, RuleRef):
            if c.rule_name not in reachable:
                reachable.add(c.rule_name)
                stack.append(bodies[c.rule_name])
        else:
            stack.extend(c.sub_clauses)
    kept = [n for n in names if n == names[0] or n in reachable]
    return [Rule(n, bodies[n]) for n in kept], alphabet


def random_grammar(rng):
    """An assembled grammar of at most MAX_CLAUSES clauses, plus alphabet."""
    while True:
        rules, alphabet = random_rules(rng)
        try:
            g = assemble_grammar(rules, rewrite_repetitions=False)
        except Exception:
            continue
        if len(g.all_clauses) <= MAX_CLAUSES:
            return g, alphabet


# ----------------------------------------------------------------------
# input sampling

def derive(rng, grammar, budget=120):
    """A string the grammar might match, by walking clause structure."""

    def walk(clause, fuel):
        if fuel[0] <= 0:
            return None
        fuel[0] -= 1
        kind = type(clause).__name__
        if kind == "Char":
            return clause.char
        if kind == "Str":
            return clause.string
        if kind == "CharSet":
            return _charset_char(rng, clause)
        if kind == "Nothing":
            return ""
        if kind == "NotFollowedBy":
            return ""
        if kind == "Seq":
            parts = []
            for s in clause.sub_clauses:
                p = walk(s, fuel)
                if p is None:
                    return None
                parts.append(p)
            return "".join(parts)
        if kind == "First":
            return walk(rng.choice(clause.sub_clauses), fuel)
        if kind == "OneOrMore":
            parts = []
            for _ in range(rng.randint(1, 2)):
                p = walk(clause.sub_clauses[0], fuel)
                if p is None:
                    return None
                parts.append(p)
            return "".join(parts)
        raise AssertionError("unexpected clause kind %s" % kind)

    for _ in range(4):
        s = walk(grammar.start_clause, [budget])
        if s is not None:
            return s
    return ""


def _charset_char(rng, cs):
    if not cs.negated:
        lo, hi = rng.choice(cs.ranges)
        return chr(rng.randint(lo, hi))
    for ch in "abcxyz019 ":
        if cs.matches_char(ch):
            return ch
    return "\xff"


def sample_input(rng, grammar, alphabet):
    """Mix of derived, mutated and random strings, length capped at 64."""
    roll = rng.random()
    if roll < 0.55:
        s = derive(rng, grammar)
    elif roll < 0.85:
        s = derive(rng, grammar)
        for _ in range(rng.randint(1, 2)):
            s = _mutate(rng, s, alphabet)
    else:
        s = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 10)))
    return s[:64]


def _mutate(rng, s, alphabet):
    roll = rng.random()
    if roll < 0.3 or not s:
        i = rng.randint(0, len(s))
        return s[:i] + rng.choice(alphabet) + s[i:]
    i = rng.randrange(len(s))
    if roll < 0.55:
        return s[:i] + s[i + 1 :]
    if roll < 0.8:
        return s[:i] + rng.choice(alphabet) + s[i + 1 :]
    return s[:i]
