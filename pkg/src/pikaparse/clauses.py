"""Clause and rule data model for the grammar graph.

A grammar is a set of named rules, each owning a tree (after assembly, a
graph) of clauses.  Clause kinds split into three groups:

* core operators: Seq, First, OneOrMore, NotFollowedBy
* terminals: Char, CharSet, Str, Nothing
* surface sugar, removed by desugaring: FollowedBy, Optional, ZeroOrMore

RuleRef is a placeholder leaf naming another rule; grammar assembly replaces
every RuleRef with a direct object reference, so none survive preprocessing.

AST labels live on the parent edge (a tuple parallel to sub_clauses), not on
the child clause.  Interning shares one clause object across every occurrence
of the same written structure, so a per-occurrence label cannot be a field of
the child.
"""
from __future__ import annotations


LEFT = "L"
RIGHT = "R"


class GrammarError(ValueError):
    """Raised for structurally invalid grammars."""


class GrammarWarning(UserWarning):
    """Non-fatal grammar oddities, e.g. a dead First alternative."""


# Display precedence levels, loosest to tightest.
_PREC_FIRST = 0
_PREC_SEQ = 1
_PREC_PREFIX = 2
_PREC_SUFFIX = 3
_PREC_ATOM = 4

_CHAR_ESCAPES = {"\n": "\\n", "\r": "\\r", "\t": "\\t", "\\": "\\\\"}

# Clauses currently being rendered, so display terminates on clause cycles.
_ACTIVE_DISPLAYS = set()


def _escape_char(ch: str, also: str) -> str:
    esc = _CHAR_ESCAPES.get(ch)
    if esc is not None:
        return esc
    if ch in also:
        return "\\" + ch
    cp = ord(ch)
    if cp < 0x20 or 0x7F <= cp < 0xA0:
        return "\\u%04X" % cp
    return ch


def escape_literal(s: str) -> str:
    """Escape a string for a single-quoted grammar literal."""
    return "".join(_escape_char(c, "'") for c in s)


def escape_set_char(ch: str) -> str:
    """Escape a character for use inside a character-set display."""
    if ch == "-":
        return "\\u002D"
    return _escape_char(ch, "]^")


class Clause:
    """Base class for all grammar clauses.

    The analysis fields (clause_idx, can_match_zero_chars, seed_parent_clauses,
    zero_idx) are populated by grammar assembly and are meaningless before it.
    """

    __slots__ = (
        "sub_clauses",
        "sub_clause_labels",
        "clause_idx",
        "can_match_zero_chars",
        "seed_parent_clauses",
        "zero_idx",
        "repeat_body",
        "repeat_tail",
    )

    min_arity = 0
    max_arity = 0
    is_terminal = False
    display_prec = _PREC_ATOM

    def __init__(self, sub_clauses=(), labels=None):
        subs = tuple(sub_clauses)
        n = len(subs)
        if n < self.min_arity or (self.max_arity is not None and n > self.max_arity):
            raise GrammarError(
                "%s takes %s subclauses, got %d"
                % (type(self).__name__, self._arity_text(), n)
            )
        self.sub_clauses = subs
        self.sub_clause_labels = tuple(labels) if labels is not None else (None,) * n
        if len(self.sub_clause_labels) != n:
            raise GrammarError("label tuple length does not match subclause count")
        self.clause_idx = -1
        self.can_match_zero_chars = False
        self.seed_parent_clauses = []
        self.zero_idx = 0
        self.repeat_body = False
        self.repeat_tail = False

    @classmethod
    def _arity_text(cls):
        if cls.min_arity == cls.max_arity:
            return str(cls.min_arity)
        if cls.max_arity is None:
            return "%d or more" % cls.min_arity
        return "%d..%d" % (cls.min_arity, cls.max_arity)

    def payload(self):
        """Kind-specific structural identity beyond subclauses."""
        return ()

    def display(self, names=None, ctx=_PREC_FIRST):
        """Canonical re-parseable text.

        names maps id(clause) to a rule name; rendering stops at named
        boundaries, which also keeps the cyclic graphs assembly produces
        printable.  A cycle hit without a name renders as "..." instead of
        recursing forever.
        """
        if names:
            nm = names.get(id(self))
            if nm is not None and ctx != -1:
                return nm
        if id(self) in _ACTIVE_DISPLAYS:
            return "..."
        _ACTIVE_DISPLAYS.add(id(self))
        try:
            body = self._display_body(names)
        finally:
            _ACTIVE_DISPLAYS.discard(id(self))
        if self.display_prec < ctx:
            return "(" + body + ")"
        return body

    def _sub_display(self, i, ctx, names):
        sub = self.sub_clauses[i]
        label = self.sub_clause_labels[i]
        if label is None:
            return sub.display(names, ctx)
        # A labeled operand binds at prefix level.
        text = label + ":" + sub.display(names, _PREC_PREFIX)
        if ctx > _PREC_PREFIX:
            return "(" + text + ")"
        return text

    def _display_body(self, names):
        raise NotImplementedError

    def __repr__(self):
        return self.display()


class Seq(Clause):
    __slots__ = ()
    min_arity = 2
    max_arity = None
    display_prec = _PREC_SEQ

    def payload(self):
        return (self.repeat_body,)

    def _display_body(self, names):
        return " ".join(
            self._sub_display(i, _PREC_PREFIX, names)
            for i in range(len(self.sub_clauses))
        )


class First(Clause):
    __slots__ = ()
    min_arity = 2
    max_arity = None
    display_prec = _PREC_FIRST

    def payload(self):
        return (self.repeat_tail,)

    def _display_body(self, names):
        return " / ".join(
            self._sub_display(i, _PREC_SEQ, names)
            for i in range(len(self.sub_clauses))
        )


class OneOrMore(Clause):
    __slots__ = ()
    min_arity = 1
    max_arity = 1
    display_prec = _PREC_SUFFIX

    def _display_body(self, names):
        return self._sub_display(0, _PREC_ATOM, names) + "+"


class NotFollowedBy(Clause):
    __slots__ = ()
    min_arity = 1
    max_arity = 1
    display_prec = _PREC_PREFIX

    def _display_body(self, names):
        return "!" + self._sub_display(0, _PREC_PREFIX, names)


class FollowedBy(Clause):
    """Surface sugar: &X desugars to !!X."""

    __slots__ = ()
    min_arity = 1
    max_arity = 1
    display_prec = _PREC_PREFIX

    def _display_body(self, names):
        return "&" + self._sub_display(0, _PREC_PREFIX, names)


class Optional(Clause):
    """Surface sugar: X? desugars to (X / ())."""

    __slots__ = ()
    min_arity = 1
    max_arity = 1
    display_prec = _PREC_SUFFIX

    def _display_body(self, names):
        return self._sub_display(0, _PREC_ATOM, names) + "?"


class ZeroOrMore(Clause):
    """Surface sugar: X* desugars to (X+ / ())."""

    __slots__ = ()
    min_arity = 1
    max_arity = 1
    display_prec = _PREC_SUFFIX

    def _display_body(self, names):
        return self._sub_display(0, _PREC_ATOM, names) + "*"


class Terminal(Clause):
    __slots__ = ()
    is_terminal = True


class Nothing(Terminal):
    """Matches the empty string at every position."""

    __slots__ = ()

    def _display_body(self, names):
        return "()"


class Char(Terminal):
    __slots__ = ("char",)

    def __init__(self, char: str):
        if len(char) != 1:
            raise GrammarError("Char takes exactly one character")
        super().__init__()
        self.char = char

    def payload(self):
        return (self.char,)

    def _display_body(self, names):
        return "'" + escape_literal(self.char) + "'"


class CharSet(Terminal):
    """A set of character ranges, optionally negated.

    Ranges are normalized (sorted, merged) so structural identity and display
    are independent of the written order.
    """

    __slots__ = ("ranges", "negated")

    def __init__(self, ranges, negated=False):
        super().__init__()
        norm = sorted((lo, hi) for lo, hi in ranges)
        merged = []
        for lo, hi in norm:
            if lo > hi:
                raise GrammarError("inverted character range")
            if merged and lo <= merged[-1][1] + 1:
                if hi > merged[-1][1]:
                    merged[-1] = (merged[-1][0], hi)
            else:
                merged.append((lo, hi))
        if not merged and not negated:
            raise GrammarError("empty character set can never match")
        self.ranges = tuple(merged)
        self.negated = bool(negated)

    @classmethod
    def of(cls, chars: str, negated=False) -> "CharSet":
        return cls([(ord(c), ord(c)) for c in chars], negated)

    def payload(self):
        return (self.ranges, self.negated)

    def matches_char(self, ch: str) -> bool:
        cp = ord(ch)
        hit = any(lo <= cp <= hi for lo, hi in self.ranges)
        return hit != self.negated

    def _display_body(self, names):
        parts = []
        for lo, hi in self.ranges:
            if lo == hi:
                parts.append(escape_set_char(chr(lo)))
            elif hi == lo + 1:
                parts.append(escape_set_char(chr(lo)) + escape_set_char(chr(hi)))
            else:
                parts.append(escape_set_char(chr(lo)) + "-" + escape_set_char(chr(hi)))
        return "[" + ("^" if self.negated else "") + "".join(parts) + "]"


class Str(Terminal):
    __slots__ = ("string",)

    def __init__(self, string: str):
        if len(string) < 2:
            raise GrammarError("Str needs two or more characters; use Char or Nothing")
        super().__init__()
        self.string = string

    def payload(self):
        return (self.string,)

    def _display_body(self, names):
        return "'" + escape_literal(self.string) + "'"


class RuleRef(Clause):
    """Named reference to a rule; resolved away during assembly."""

    __slots__ = ("rule_name",)

    def __init__(self, rule_name: str):
        super().__init__()
        self.rule_name = rule_name

    def payload(self):
        return (self.rule_name,)

    def _display_body(self, names):
        return self.rule_name


SURFACE_KINDS = (FollowedBy, Optional, ZeroOrMore)
CORE_KINDS = (Seq, First, OneOrMore, NotFollowedBy, Char, CharSet, Str, Nothing)


class Rule:
    """A named rule.  precedence/associativity only appear on rules declared
    with the bracket shorthand; hidden marks synthetic repetition helpers;
    alias marks the base-name rule generated for a precedence group."""

    __slots__ = (
        "name",
        "clause",
        "precedence",
        "associativity",
        "ast_label",
        "hidden",
        "alias",
        "precedence_group",
    )

    def __init__(
        self,
        name: str,
        clause: Clause,
        precedence=None,
        associativity=None,
        ast_label=None,
        hidden=False,
        alias=False,
        precedence_group=None,
    ):
        if associativity not in (None, LEFT, RIGHT):
            raise GrammarError("associativity must be %r or %r" % (LEFT, RIGHT))
        self.name = name
        self.clause = clause
        self.precedence = precedence
        self.associativity = associativity
        self.ast_label = ast_label
        self.hidden = hidden
        self.alias = alias
        self.precedence_group = precedence_group

    def __repr__(self):
        ann = ""
        if self.precedence is not None:
            ann = "[%d%s]" % (
                self.precedence,
                "," + self.associativity if self.associativity else "",
            )
        return "%s%s <- %r" % (self.name, ann, self.clause)
