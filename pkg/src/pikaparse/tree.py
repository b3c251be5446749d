"""Parse trees and ASTs extracted from a filled memo table.

Extraction never recurses: repetition chains make tree depth proportional to
input length, so every walk here uses an explicit stack.

flatten_repetitions undoes the right-recursive repetition rewrite in the
tree: a chain of rewrite-flagged nodes collapses into one node whose
children are the repeated items in input order.

to_ast keeps only labeled nodes.  An unlabeled node dissolves and its
labeled descendants attach to the nearest labeled ancestor.
"""
from __future__ import annotations

from .clauses import First, OneOrMore
from .engine import Match, MemoTable


class ParseTreeNode:
    """One node of the concrete parse tree.

    name is the owning rule's name when the clause is a rule body, else the
    clause's canonical text.  label is the AST label attached where this
    node was referenced, if any.  text is the covered slice of the input.
    """

    __slots__ = ("clause", "name", "label", "pos", "len", "source", "children")

    def __init__(self, clause, name, label, pos, length, source):
        self.clause = clause
        self.name = name
        self.label = label
        self.pos = pos
        self.len = length
        self.source = source
        self.children = []

    @property
    def end(self):
        return self.pos + self.len

    @property
    def text(self):
        return self.source[self.pos : self.pos + self.len]

    def __repr__(self):
        return "<%s [%d,%d)%s>" % (
            self.name,
            self.pos,
            self.end,
            " %s" % self.label if self.label else "",
        )


class ASTNode:
    """A labeled node surviving AST projection."""

    __slots__ = ("label", "pos", "len", "source", "children")

    def __init__(self, label, pos, length, source, children):
        self.label = label
        self.pos = pos
        self.len = length
        self.source = source
        self.children = children

    @property
    def end(self):
        return self.pos + self.len

    @property
    def text(self):
        return self.source[self.pos : self.pos + self.len]

    def __repr__(self):
        return "<%s [%d,%d) %d children>" % (
            self.label,
            self.pos,
            self.end,
            len(self.children),
        )


def _edge_label(match: Match, i: int):
    labels = match.clause.sub_clause_labels
    kind = type(match.clause)
    if kind is First:
        return labels[match.alt_idx]
    if kind is OneOrMore:
        return labels[0]
    return labels[i]


def node_from_match(match: Match, grammar, source: str) -> ParseTreeNode:
    """Build the parse tree for one match, iteratively."""

    def mk(m, label):
        label = label if label is not None else grammar.clause_label(m.clause)
        return ParseTreeNode(
            m.clause, grammar.node_name(m.clause), label, m.pos, m.len, source
        )

    root = mk(match, None)
    stack = [(match, root)]
    while stack:
        m, node = stack.pop()
        for i, sm in enumerate(m.sub_matches):
            child = mk(sm, _edge_label(m, i))
            node.children.append(child)
            stack.append((sm, child))
    return root


def extract_parse_tree(table: MemoTable, flatten: bool = True):
    """Parse tree of the start rule's best match at position 0, or None.

    The match need not span the whole input; check table.matched_whole()
    when that distinction matters.
    """
    m = table.start_match()
    if m is None:
        return None
    root = node_from_match(m, table.grammar, table.text)
    if flatten:
        root = flatten_repetitions(root)
    return root


def _is_chain(clause) -> bool:
    return clause.repeat_body or clause.repeat_tail


def _chain_items(start: ParseTreeNode):
    """Walk a repetition chain, returning the item nodes in input order.

    Chains alternate body (item, rest) pairs and continue-or-stop tails; a
    zero-length or childless tail ends the chain.
    """
    items = []
    cur = start
    while True:
        cl = cur.clause
        if cl.repeat_tail:
            if cur.len == 0 or not cur.children:
                break
            cur = cur.children[0]
        elif cl.repeat_body:
            if not cur.children:
                break
            items.append(cur.children[0])
            if len(cur.children) < 2:
                break
            cur = cur.children[1]
        else:
            break
    return items


def flatten_repetitions(root: ParseTreeNode) -> ParseTreeNode:
    """Collapse rewrite chains back into flat repetition nodes.

    Returns a new tree; the input tree is left untouched.
    """

    def expand(old):
        new = ParseTreeNode(
            old.clause, old.name, old.label, old.pos, old.len, old.source
        )
        if _is_chain(old.clause):
            return new, _chain_items(old)
        return new, old.children

    new_root, kids = expand(root)
    stack = [(k, new_root) for k in reversed(kids)]
    while stack:
        old, parent = stack.pop()
        new, kids = expand(old)
        parent.children.append(new)
        stack.extend((k, new) for k in reversed(kids))
    return new_root


def to_ast(root: ParseTreeNode):
    """Project a parse tree down to its labeled nodes.

    Returns None when nothing is labeled, the single ASTNode when exactly
    one survives at top level, else a synthetic unlabeled root holding them.
    """
    if root is None:
        return None
    gathered = {}
    stack = [(root, False)]
    while stack:
        node, done = stack.pop()
        if not done:
            stack.append((node, True))
            stack.extend((c, False) for c in reversed(node.children))
            continue
        kids = []
        for c in node.children:
            kids.extend(gathered.pop(id(c)))
        if node.label is not None:
            kids = [ASTNode(node.label, node.pos, node.len, node.source, kids)]
        gathered[id(node)] = kids
    top = gathered.pop(id(root))
    if not top:
        return None
    if len(top) == 1:
        return top[0]
    return ASTNode(None, root.pos, root.len, root.source, top)
