"""Shared fixtures for the test suite: grammar texts and tree utilities.

The three arithmetic grammars describe the same expression language at
five precedence levels (parentheses, atoms, unary minus, mul/div,
add/sub), encoded three ways:

- ARITH_CLIMB:    plain precedence climbing, no recursion into the same
                  level, so runs of operators and nested '-' do not parse
- ARITH_LEFTREC:  left-recursive at the binary-operator levels, so runs
                  parse left-associated and '-' / parens self-nest
- ARITH_SHORTHAND: bracket notation that expands to ARITH_LEFTREC
"""

from pikaparse import compile_grammar, extract_parse_tree, parse

ARITH_CLIMB = """
E4 <- '(' E0 ')';
E3 <- ([0-9]+ / [a-z]+) / E4;
E2 <- ('-' E3) / E3;
E1 <- (E2 ('*' / '/') E2) / E2;
E0 <- (E1 ('+' / '-') E1) / E1;
"""

ARITH_LEFTREC = """
E4 <- '(' E0 ')';
E3 <- ([0-9]+ / [a-z]+) / E4;
E2 <- ('-' (E2 / E3)) / E3;
E1 <- (E1 ('*' / '/') E2) / E2;
E0 <- (E0 ('+' / '-') E1) / E1;
"""

ARITH_SHORTHAND = """
E[4] <- '(' E ')';
E[3] <- [0-9]+ / [a-z]+;
E[2] <- '-' E;
E[1,L] <- E ('*' / '/') E;
E[0,L] <- E ('+' / '-') E;
"""

ASSIGN = """
Program <- Assign+;
Assign <- lhs:[a-z]+ '=' rhs:[0-9]+ ';';
"""


def compile_leftrec():
    return compile_grammar(ARITH_LEFTREC, start_rule="E0")


def compile_climb():
    return compile_grammar(ARITH_CLIMB, start_rule="E0")


def parse_tree(grammar, text):
    """Parse text and return the flattened parse tree, or None."""
    return extract_parse_tree(parse(grammar, text))


def shape(node):
    """Nested-tuple skeleton of a tree: (name, pos, len, children)."""
    return (node.name, node.pos, node.len, tuple(shape(c) for c in node.children))


def sexpr(grammar, node):
    """Compact s-expression over named nodes only, with leaf text.

    Anonymous interior nodes are elided so that two grammars producing
    the same rule structure compare equal even when they group
    subexpressions with different unnamed clauses.
    """
    parts = _named_items(grammar, node)
    if len(parts) == 1:
        return parts[0]
    return "(" + " ".join(parts) + ")"


def _named_items(grammar, node):
    name = grammar.clause_name(node.clause)
    if not node.children:
        if name:
            return ["(%s %r)" % (name, node.text)]
        return [repr(node.text)]
    inner = []
    for c in node.children:
        inner.extend(_named_items(grammar, c))
    if name:
        return ["(%s %s)" % (name, " ".join(inner))]
    return inner
