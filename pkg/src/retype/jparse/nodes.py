"""AST node type shared by the parser, template matcher and analyses."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .typeref import TypeRef

EXPRESSION_KINDS = frozenset(
    """
    MethodCall FieldAccess NameRef New NewArray ArrayInit Binary Unary Postfix
    Literal Lambda Cast Assignment Conditional InstanceOf ArrayAccess Paren
    This Super MethodRef Hole
    """.split()
)
STATEMENT_KINDS = frozenset(
    "ExprStmt If While For ForEach Return LocalVarDecl Block Opaque Empty".split()
)
DECLARATION_KINDS = frozenset({"FieldDecl", "LocalVarDecl", "Param", "MethodDecl"})


@dataclass(eq=False)
class Node:
    kind: str
    start: int
    end: int
    children: list[Node] = field(default_factory=list)
    # identifier, operator, literal text or hole number depending on kind
    text: str | None = None
    # modifiers, plus markers such as "recv" on calls and "ctor" on methods
    mods: tuple[str, ...] = ()
    # resolved value on TypeRef nodes
    type: TypeRef | None = None
    id: int = -1
    parent: Node | None = field(default=None, repr=False)

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)

    @property
    def is_expression(self) -> bool:
        return self.kind in EXPRESSION_KINDS

    def walk(self) -> Iterator[Node]:
        """Pre-order traversal."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def ancestors(self) -> Iterator[Node]:
        node = self.parent
        while node is not None:
            yield node
            node = node.parent

    def child(self, kind: str) -> Node | None:
        for c in self.children:
            if c.kind == kind:
                return c
        return None

    def typeref(self) -> Node | None:
        """The TypeRef child of a declaration, cast, or allocation."""
        return self.child("TypeRef")

    # -- role accessors -----------------------------------------------------
    @property
    def receiver(self) -> Node | None:
        if self.kind == "MethodCall":
            return self.children[0] if "recv" in self.mods else None
        if self.kind in ("FieldAccess", "MethodRef"):
            return self.children[0]
        return None

    @property
    def args(self) -> list[Node]:
        if self.kind == "MethodCall":
            return self.children[1:] if "recv" in self.mods else list(self.children)
        if self.kind == "New":
            return self.children[1:]
        return []

    @property
    def initializer(self) -> Node | None:
        if self.kind in ("FieldDecl", "LocalVarDecl") and len(self.children) > 1:
            return self.children[1]
        return None

    @property
    def params(self) -> list[Node]:
        return [c for c in self.children if c.kind == "Param"]

    @property
    def body(self) -> Node | None:
        if self.kind in ("MethodDecl", "Initializer"):
            return self.child("Block")
        if self.kind == "Lambda":
            return self.children[-1]
        return None


def set_parents(root: Node) -> None:
    for node in root.walk():
        for c in node.children:
            c.parent = node


def enclosing(node: Node, *kinds: str) -> Node | None:
    for a in node.ancestors():
        if a.kind in kinds:
            return a
    return None


def contains(outer: Node | tuple[int, int], inner: Node | tuple[int, int]) -> bool:
    o = outer.span if isinstance(outer, Node) else outer
    i = inner.span if isinstance(inner, Node) else inner
    return o[0] <= i[0] and i[1] <= o[1]
