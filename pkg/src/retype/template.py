"""Before/after expression templates with numbered ``$n$`` holes.

Hole 1 only binds a reference to the migration root; every other hole binds
any expression that does not mention the root.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

from .jparse import LexError, Node, ParseError, parse_expression, tokenize
from .jparse.parser import BINARY_PREC

PRIMARY = 16
POSTFIX = 15
UNARY = 14
CONDITIONAL = 2
ASSIGNMENT = 1
LAMBDA = 0

_PRIMARY_KINDS = frozenset(
    "Literal NameRef MethodCall FieldAccess New NewArray ArrayAccess Paren This Super MethodRef Hole ArrayInit".split()
)

RootPredicate = Callable[[Node], bool]
Bindings = dict[int, Node]


class TemplateError(Exception):
    pass


class MissingBinding(KeyError):
    def __init__(self, hole: int):
        super().__init__(hole)
        self.hole = hole

    def __str__(self) -> str:
        return f"no binding for hole ${self.hole}$"


@dataclass(frozen=True)
class Template:
    raw: str
    body: Node = field(compare=False, repr=False)
    holes: frozenset[int] = field(compare=False)

    @cached_property
    def concrete_tokens(self) -> int:
        """Number of non-hole tokens; the specificity score of a rule."""
        return sum(1 for t in tokenize(self.raw, template=True) if t.kind != "hole")


def parse_template(text: str) -> Template:
    try:
        toks = tokenize(text, template=True)
    except LexError as err:
        raise TemplateError(f"{text!r}: {err}") from None
    holes = set()
    for t in toks:
        if t.kind == "hole":
            n = int(t.text.strip("$"))
            if n < 1:
                raise TemplateError(f"{text!r}: hole numbers start at 1, got {t.text}")
            holes.add(n)
    try:
        body = parse_expression(text, template=True)
    except ParseError as err:
        raise TemplateError(f"{text!r} is not an expression: {err}") from None
    return Template(text, body, frozenset(holes))


# -- matching ---------------------------------------------------------------

def _norm(text: str | None) -> str:
    return re.sub(r"\s+", "", text or "")


def same_tree(a: Node, b: Node) -> bool:
    """Structural equality: same kinds, names, operators and literal texts."""
    if a.kind != b.kind:
        return False
    if a.kind == "TypeRef":
        return _norm(a.text) == _norm(b.text)
    if a.text != b.text or a.mods != b.mods or len(a.children) != len(b.children):
        return False
    return all(same_tree(x, y) for x, y in zip(a.children, b.children))


def mentions_root(node: Node, root: RootPredicate) -> bool:
    return any(root(n) for n in node.walk())


def _match(p: Node, n: Node, root: RootPredicate, bindings: Bindings) -> bool:
    if p.kind == "Hole":
        hole = int(p.text)
        if not n.is_expression:
            return False
        if hole == 1:
            if not root(n):
                return False
        elif mentions_root(n, root):
            return False
        if hole in bindings:
            return same_tree(bindings[hole], n)
        bindings[hole] = n
        return True
    if p.kind != n.kind:
        return False
    if p.kind == "TypeRef":
        return _norm(p.text) == _norm(n.text)
    if p.text != n.text or p.mods != n.mods or len(p.children) != len(n.children):
        return False
    return all(_match(pc, nc, root, bindings) for pc, nc in zip(p.children, n.children))


def match(template: Template, node: Node, root: RootPredicate) -> Bindings | None:
    """Match ``template`` against the expression ``node``.

    ``root`` recognises references to the migration root element.
    """
    bindings: Bindings = {}
    if _match(template.body, node, root, bindings):
        return bindings
    return None


# -- precedence -------------------------------------------------------------

def precedence(node: Node) -> int:
    k = node.kind
    if k in _PRIMARY_KINDS:
        return PRIMARY
    if k == "Postfix":
        return POSTFIX
    if k in ("Unary", "Cast"):
        return UNARY
    if k == "Binary":
        return BINARY_PREC[node.text] + 2
    if k == "InstanceOf":
        return BINARY_PREC["instanceof"] + 2
    if k == "Conditional":
        return CONDITIONAL
    if k == "Assignment":
        return ASSIGNMENT
    return LAMBDA


def required_precedence(parent: Node | None, index: int) -> int:
    """Lowest precedence an expression may have at ``parent.children[index]``."""
    if parent is None:
        return LAMBDA
    k = parent.kind
    if k == "MethodCall":
        return PRIMARY if index == 0 and "recv" in parent.mods else LAMBDA
    if k in ("FieldAccess", "MethodRef", "Postfix"):
        return PRIMARY
    if k == "ArrayAccess":
        return PRIMARY if index == 0 else LAMBDA
    if k in ("Unary", "Cast"):
        return UNARY
    if k == "Binary":
        p = BINARY_PREC[parent.text] + 2
        return p if index == 0 else p + 1
    if k == "InstanceOf":
        return BINARY_PREC["instanceof"] + 2
    if k == "Conditional":
        return (CONDITIONAL + 1, LAMBDA, CONDITIONAL)[index]
    if k == "Assignment":
        return PRIMARY if index == 0 else LAMBDA
    return LAMBDA


def context_precedence(node: Node) -> int:
    parent = node.parent
    if parent is None:
        return LAMBDA
    return required_precedence(parent, next(i for i, c in enumerate(parent.children) if c is node))


def _wrap(text: str, prec: int, required: int) -> str:
    return f"({text})" if prec < required else text


def substitute(
    after: Template,
    bindings: Bindings,
    source: str,
    *,
    context: int = LAMBDA,
    render: Callable[[Node], str] | None = None,
) -> str:
    """Instantiate ``after`` with bound subtrees.

    Bound text comes from ``render`` (defaults to the node's source text).
    ``context`` is the precedence required where the result is inserted.
    Subtrees binding looser than their slot are parenthesised.
    """
    render = render or (lambda n: source[n.start : n.end])
    for hole in after.holes:
        if hole not in bindings:
            raise MissingBinding(hole)
    body = after.body
    if body.kind == "Hole":
        bound = bindings[int(body.text)]
        return _wrap(render(bound), precedence(bound), context)

    pieces = []
    prev = 0
    for hole_node in sorted((n for n in body.walk() if n.kind == "Hole"), key=lambda n: n.start):
        bound = bindings[int(hole_node.text)]
        pieces.append(after.raw[prev : hole_node.start])
        pieces.append(_wrap(render(bound), precedence(bound), context_precedence(hole_node)))
        prev = hole_node.end
    pieces.append(after.raw[prev:])
    text = "".join(pieces).strip()
    return _wrap(text, precedence(body), context)
