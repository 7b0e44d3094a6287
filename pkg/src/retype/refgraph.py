"""Name resolution, reference search and type-constraint propagation."""

from __future__ import annotations

import hashlib
import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .jparse import LexError, Node, ParseError, TypeRef, contains, match_type, parse_compilation_unit
from .jparse.nodes import EXPRESSION_KINDS

log = logging.getLogger(__name__)

ELEMENT_KINDS = {"FieldDecl": "Field", "LocalVarDecl": "LocalVar", "Param": "Parameter", "MethodDecl": "MethodReturn"}
EDGE_REASONS = ("Assignment", "ArgumentPassing", "ReturnFlow", "FieldAccess")


class ScopeError(Exception):
    pass


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class RootElement:
    kind: str  # LocalVar | Parameter | Field | MethodReturn
    name: str
    decl_id: int
    declared: TypeRef
    path: str
    method_id: int | None
    class_id: int | None


@dataclass(frozen=True)
class Usage:
    """One reference site of an element.

    ``role`` is ``ref`` for a name or field reference, ``call`` for a call of
    a migrated method and ``value`` for an expression flowing *into* the
    element (initializer, assigned value, argument, returned value).
    """

    site: Node
    element: RootElement
    path: str
    role: str = "ref"
    ambiguous: bool = False
    reason: str | None = None
    witness: Node | None = None

    @property
    def parent(self) -> Node | None:
        return self.site.parent

    @property
    def method_id(self) -> int | None:
        for a in self.site.ancestors():
            if a.kind == "MethodDecl":
                return a.id
        return None

    @property
    def opaque(self) -> bool:
        return any(a.kind == "Opaque" for a in self.site.ancestors())


@dataclass(frozen=True)
class Scope:
    kind: str  # Local | File | Project
    anchor: int | None
    path: str | None = None
    span: tuple[int, int] | None = None

    def contains(self, node: Node, path: str) -> bool:
        if self.kind == "Project":
            return True
        if path != self.path:
            return False
        return self.kind == "File" or contains(self.span, node)

    def contains_element(self, project: Project, element: RootElement) -> bool:
        if self.kind == "Local" and element.kind not in ("LocalVar", "Parameter"):
            return False
        return self.contains(project.nodes[element.decl_id], element.path)


@dataclass(frozen=True)
class PropagationEdge:
    source: RootElement
    target: RootElement
    reason: str
    witness: int


@dataclass(frozen=True)
class Connection:
    """Where a usage's value flows, as seen by propagation."""

    target: RootElement | None
    reason: str
    witness: Node
    ambiguous: bool = False


@dataclass
class Propagation:
    elements: list[RootElement]
    edges: list[PropagationEdge]

    def __iter__(self):
        yield self.elements
        yield self.edges


@dataclass
class SourceFile:
    path: str
    text: str
    unit: Node | None = None
    error: Exception | None = None

    @property
    def digest(self) -> str:
        return digest(self.text)


# -- project index ------------------------------------------------------------

class Project:
    """Parsed snapshot of a set of Java files plus resolution tables."""

    def __init__(self, sources: dict[str, str], root: Path | None = None):
        self.root = root
        self.files: dict[str, SourceFile] = {}
        self.nodes: dict[int, Node] = {}
        self.node_path: dict[int, str] = {}
        self.classes: dict[str, Node] = {}
        self.resolution: dict[int, int] = {}
        self.references: dict[int, list[Node]] = {}
        self.call_candidates: dict[int, list[Node]] = {}
        ids = itertools.count(1)
        for path in sorted(sources):
            sf = SourceFile(path, sources[path])
            try:
                sf.unit = parse_compilation_unit(sf.text, ids=ids)
            except (LexError, ParseError) as err:
                sf.error = err
                log.warning("skipping %s: %s", path, err)
            self.files[path] = sf
        for sf in self.parsed():
            for n in sf.unit.walk():
                self.nodes[n.id] = n
                self.node_path[n.id] = sf.path
            package = sf.unit.text
            for cls in sf.unit.children:
                if cls.kind == "ClassDecl":
                    self.classes.setdefault(f"{package}.{cls.text}" if package else cls.text, cls)
                    self.classes.setdefault(cls.text, cls)
        for sf in self.parsed():
            _Resolver(self, sf).run()
        for ref_id, decl_id in self.resolution.items():
            self.references.setdefault(decl_id, []).append(self.nodes[ref_id])

    @classmethod
    def load(cls, root: str | Path) -> Project:
        root = Path(root)
        sources = {}
        for p in sorted(root.rglob("*.java")):
            rel = p.relative_to(root)
            if any(part.startswith(".") for part in rel.parts[:-1]):
                continue
            sources[rel.as_posix()] = p.read_bytes().decode("utf-8")
        return cls(sources, root)

    def parsed(self) -> Iterator[SourceFile]:
        return (sf for sf in self.files.values() if sf.unit is not None)

    # -- declarations -------------------------------------------------------
    def declarations(self, path: str | None = None) -> Iterator[Node]:
        for sf in self.parsed():
            if path is not None and sf.path != path:
                continue
            for n in sf.unit.walk():
                if n.kind in ELEMENT_KINDS and self.element(n) is not None:
                    yield n

    def element(self, decl: Node) -> RootElement | None:
        kind = ELEMENT_KINDS.get(decl.kind)
        tnode = decl.typeref()
        if kind is None or tnode is None or tnode.type.fqn == "void" or "ctor" in decl.mods:
            return None
        if decl.kind == "Param" and decl.parent is not None and decl.parent.kind == "Lambda":
            return None
        method = decl if decl.kind == "MethodDecl" else _enclosing(decl, "MethodDecl")
        cls = _enclosing(decl, "ClassDecl")
        return RootElement(
            kind, decl.text, decl.id, tnode.type, self.node_path[decl.id],
            method.id if method else None, cls.id if cls else None,
        )

    def element_by_id(self, decl_id: int) -> RootElement | None:
        node = self.nodes.get(decl_id)
        return self.element(node) if node is not None else None

    def unit_of(self, path: str) -> Node:
        return self.files[path].unit

    # -- expression facts ---------------------------------------------------
    def decl_type(self, decl: Node) -> TypeRef | None:
        t = decl.typeref()
        return t.type if t is not None else None

    def class_type(self, cls: Node) -> TypeRef:
        unit = _enclosing(cls, "CompilationUnit")
        fqn = f"{unit.text}.{cls.text}" if unit is not None and unit.text else cls.text
        return TypeRef(fqn, raw=cls.text)

    def expr_type(self, node: Node) -> TypeRef | None:
        k = node.kind
        if k in ("NameRef", "FieldAccess"):
            decl = self.resolution.get(node.id)
            return self.decl_type(self.nodes[decl]) if decl is not None else None
        if k == "MethodCall":
            targets = self.call_targets(node)
            if len(targets) == 1 and "ctor" not in targets[0].mods:
                return self.decl_type(targets[0])
            return None
        if k in ("New", "Cast"):
            return node.typeref().type
        if k == "Paren":
            return self.expr_type(node.children[0])
        if k == "This":
            cls = _enclosing(node, "ClassDecl")
            return self.class_type(cls) if cls is not None else None
        if k == "Literal":
            return _literal_type(node.text)
        return None

    def class_of_type(self, t: TypeRef | None) -> Node | None:
        if t is None or t.dims:
            return None
        return self.classes.get(t.fqn)

    def call_targets(self, call: Node, skip: Callable[[Node], bool] | None = None) -> list[Node]:
        """Overload resolution by arity plus exact types of the known arguments.

        Arguments for which ``skip`` is true take no part in the filter.
        """
        candidates = self.call_candidates.get(call.id, [])
        if len(candidates) <= 1:
            return list(candidates)
        args = call.args
        kept = []
        for m in candidates:
            ok = True
            for arg, param in zip(args, m.params):
                if skip is not None and skip(arg):
                    continue
                at = self.expr_type(arg)
                if at is not None and at.fqn != "null" and at != self.decl_type(param):
                    ok = False
                    break
            if ok:
                kept.append(m)
        return kept

    def ref_decl(self, node: Node) -> int | None:
        """Declaration id a reference-like node stands for, if unambiguous."""
        if node.kind in ("NameRef", "FieldAccess"):
            return self.resolution.get(node.id)
        if node.kind == "MethodCall":
            targets = self.call_targets(node)
            if len(targets) == 1 and "ctor" not in targets[0].mods:
                return targets[0].id
        if node.kind == "Paren":
            return self.ref_decl(node.children[0])
        return None

    def ref_element(self, node: Node) -> RootElement | None:
        decl = self.ref_decl(node)
        return self.element_by_id(decl) if decl is not None else None

    def calls_to(self, method: Node) -> list[tuple[Node, bool]]:
        """Call sites that may invoke ``method`` and whether they are ambiguous."""
        out = []
        for call_id, candidates in self.call_candidates.items():
            if not any(m is method for m in candidates):
                continue
            call = self.nodes[call_id]
            targets = self.call_targets(call)
            if len(targets) == 1 and targets[0] is method:
                out.append((call, False))
            elif len(targets) > 1 and any(m is method for m in targets):
                out.append((call, True))
        out.sort(key=lambda c: (self.node_path[c[0].id], c[0].start))
        return out


def _literal_type(text: str) -> TypeRef | None:
    if text.startswith('"'):
        return TypeRef("java.lang.String", raw="String")
    if text.startswith("'"):
        return TypeRef("char")
    if text in ("true", "false"):
        return TypeRef("boolean")
    if text == "null":
        return TypeRef("null")
    low = text.lower()
    if low.endswith("l"):
        return TypeRef("long")
    if low.endswith("f"):
        return TypeRef("float")
    if "." in text or low.endswith("d") or ("e" in low and not low.startswith("0x")):
        return TypeRef("double")
    return TypeRef("int")


def _enclosing(node: Node, kind: str) -> Node | None:
    for a in node.ancestors():
        if a.kind == kind:
            return a
    return None


class _Resolver:
    """One lexical-scoping pass over a file, filling the project tables."""

    def __init__(self, project: Project, sf: SourceFile):
        self.p = project
        self.sf = sf
        self.cls: Node | None = None
        self.fields: dict[str, Node] = {}

    def run(self) -> None:
        for cls in self.sf.unit.children:
            if cls.kind != "ClassDecl":
                continue
            self.cls = cls
            self.fields = {m.text: m for m in cls.children if m.kind == "FieldDecl"}
            for member in cls.children:
                if member.kind == "MethodDecl":
                    env = [self.fields, {p.text: p for p in member.params}]
                    for p in member.params:
                        self.visit(p, env)
                    if member.body is not None:
                        self.visit(member.body, env)
                elif member.kind == "FieldDecl" and member.initializer is not None:
                    self.visit(member.initializer, [self.fields])
                elif member.kind == "Initializer":
                    self.visit(member.body, [self.fields])

    def lookup(self, name: str, env: list[dict[str, Node]]) -> Node | None:
        for scope in reversed(env):
            if name in scope:
                return scope[name]
        return None

    def methods_of(self, cls: Node, name: str, arity: int, ctor: bool = False) -> list[Node]:
        return [
            m for m in cls.children
            if m.kind == "MethodDecl" and m.text == name and len(m.params) == arity and (("ctor" in m.mods) == ctor)
        ]

    def target_class(self, expr: Node, env) -> Node | None:
        if expr.kind == "This":
            return self.cls
        if expr.kind == "NameRef" and self.lookup(expr.text, env) is None:
            return self.p.classes.get(expr.text)  # static access through a class name
        return self.p.class_of_type(self.p.expr_type(expr))

    def visit(self, node: Node, env: list[dict[str, Node]]) -> None:
        k = node.kind
        if k in ("Block", "For", "ForEach", "Lambda"):
            scope: dict[str, Node] = {}
            env = env + [scope]
            if k == "ForEach":
                self.visit(node.children[1], env)
                scope[node.children[0].text] = node.children[0]
                self.visit(node.children[0], env)
                self.visit(node.children[2], env)
                return
            for c in node.children:
                if c.kind == "Param":
                    scope[c.text] = c
                self.visit(c, env)
                if c.kind == "LocalVarDecl":
                    scope[c.text] = c
            return
        if k == "NameRef":
            decl = self.fields.get(node.text) if "this" in node.mods else self.lookup(node.text, env)
            if decl is not None:
                self.p.resolution[node.id] = decl.id
            return
        for c in node.children:
            self.visit(c, env)
        if k == "FieldAccess":
            cls = self.target_class(node.children[0], env)
            if cls is not None:
                for m in cls.children:
                    if m.kind == "FieldDecl" and m.text == node.text:
                        self.p.resolution[node.id] = m.id
                        break
        elif k == "MethodCall":
            recv = node.receiver
            if node.text in ("this", "super"):
                cls, name, ctor = (self.cls, self.cls.text, True) if node.text == "this" else (None, "", True)
            elif recv is None:
                cls, name, ctor = self.cls, node.text, False
            else:
                cls, name, ctor = self.target_class(recv, env), node.text, False
            if cls is not None:
                found = self.methods_of(cls, name, len(node.args), ctor)
                if found:
                    self.p.call_candidates[node.id] = found
        elif k == "New":
            cls = self.p.class_of_type(node.typeref().type)
            if cls is not None:
                found = self.methods_of(cls, cls.text, len(node.args), True)
                if found:
                    self.p.call_candidates[node.id] = found


# -- scopes and references ------------------------------------------------------

def make_scope(project: Project, root: RootElement, kind: str) -> Scope:
    kind = kind.capitalize()
    if kind == "Project":
        return Scope("Project", None)
    if kind == "File":
        unit = project.unit_of(root.path)
        return Scope("File", unit.id, root.path, unit.span)
    if kind == "Local":
        if root.kind in ("Field", "MethodReturn"):
            raise ScopeError(f"Local scope is not available for a {root.kind} root")
        decl = project.nodes[root.decl_id]
        anchor = _enclosing(decl, "MethodDecl") or _enclosing(decl, "Initializer")
        if anchor is None:
            raise ScopeError(f"{root.name} has no enclosing method")
        return Scope("Local", anchor.id, root.path, anchor.span)
    raise ScopeError(f"unknown scope {kind!r}")


def resolve(project: Project, name_ref: Node) -> int | None:
    return project.resolution.get(name_ref.id)


def find_references(project: Project, root: RootElement, scope: Scope) -> list[Usage]:
    if scope.kind == "Local" and root.kind in ("Field", "MethodReturn"):
        raise ScopeError(f"Local scope is not available for a {root.kind} root")
    usages = []
    if root.kind == "MethodReturn":
        for call, ambiguous in project.calls_to(project.nodes[root.decl_id]):
            path = project.node_path[call.id]
            if scope.contains(call, path):
                usages.append(Usage(call, root, path, "call", ambiguous))
        return usages
    for ref in project.references.get(root.decl_id, []):
        path = project.node_path[ref.id]
        if scope.contains(ref, path):
            usages.append(Usage(ref, root, path))
    usages.sort(key=lambda u: (u.path, u.site.start))
    return usages


def _is_simple_assign(node: Node | None) -> bool:
    return node is not None and node.kind == "Assignment" and node.text == "="


def incoming_values(project: Project, element: RootElement, scope: Scope) -> list[Usage]:
    """Expressions whose value flows into ``element`` within ``scope``."""
    decl = project.nodes[element.decl_id]
    out: list[Usage] = []

    def add(value: Node | None, reason: str, witness: Node) -> None:
        if value is None:
            return
        path = project.node_path[value.id]
        if scope.contains(value, path):
            out.append(Usage(value, element, path, "value", reason=reason, witness=witness))

    if element.kind in ("Field", "LocalVar"):
        add(decl.initializer, "Assignment", decl)
        for ref in project.references.get(element.decl_id, []):
            parent = ref.parent
            if _is_simple_assign(parent) and parent.children[0] is ref:
                add(parent.children[1], "Assignment", parent)
    elif element.kind == "Parameter":
        method = decl.parent
        if method is not None and method.kind == "MethodDecl":
            index = next(i for i, p in enumerate(method.params) if p is decl)
            for call, ambiguous in project.calls_to(method):
                if not ambiguous and index < len(call.args):
                    add(call.args[index], "ArgumentPassing", call)
    elif element.kind == "MethodReturn":
        body = decl.body
        if body is not None:
            for n in body.walk():
                if n.kind == "Return" and n.children and _enclosing_callable(n) is decl:
                    add(n.children[0], "ReturnFlow", n)
    out.sort(key=lambda u: (u.path, u.site.start))
    return out


def _enclosing_callable(node: Node) -> Node | None:
    for a in node.ancestors():
        if a.kind in ("MethodDecl", "Lambda"):
            return a
    return None


def connection(project: Project, usage: Usage) -> Connection | None:
    """The neighbouring element a usage connects to through a type constraint."""
    s = usage.site
    if usage.role == "value":
        target = project.ref_element(s)
        if target is None:
            return None
        reason = "FieldAccess" if s.kind == "FieldAccess" else usage.reason
        return Connection(target, reason, usage.witness)
    p = s.parent
    if p is None:
        return None
    if _is_simple_assign(p):
        lhs, rhs = p.children
        other = lhs if rhs is s else rhs
        target = project.ref_element(other)
        if target is None:
            return None
        field_access = other.kind == "FieldAccess" or s.kind == "FieldAccess"
        return Connection(target, "FieldAccess" if field_access else "Assignment", p)
    if p.kind in ("FieldDecl", "LocalVarDecl") and p.initializer is s:
        return Connection(project.element(p), "Assignment", p)
    if p.kind in ("MethodCall", "New") and any(a is s for a in p.args):
        index = next(i for i, a in enumerate(p.args) if a is s)
        own = usage.element.decl_id
        targets = project.call_targets(p, skip=lambda a: project.ref_decl(a) == own)
        if len(targets) > 1:
            return Connection(None, "ArgumentPassing", p, ambiguous=True)
        if len(targets) == 1 and index < len(targets[0].params):
            return Connection(project.element(targets[0].params[index]), "ArgumentPassing", p)
        return None
    if p.kind == "Return":
        method = _enclosing_callable(p)
        if method is not None and method.kind == "MethodDecl":
            target = project.element(method)
            if target is not None:
                return Connection(target, "ReturnFlow", p)
    return None


def propagate(
    project: Project,
    root: RootElement,
    scope: Scope,
    from_type: TypeRef | None = None,
    binding: dict | None = None,
    adapted: Callable[[Usage], bool] | None = None,
) -> Propagation:
    """Worklist closure of the elements that must change type with ``root``.

    A neighbour joins when its declared type matches ``from_type`` under the
    root's type-variable ``binding``, it lies in ``scope``, and ``adapted``
    (when given) reports that no rewrite rule handles the connecting usage.
    """
    from_type = from_type or root.declared
    elements = [root]
    seen = {root.decl_id}
    edges: list[PropagationEdge] = []
    work = deque([root])
    while work:
        current = work.popleft()
        for usage in flow_sites(project, current, scope):
            conn = connection(project, usage)
            if conn is None or conn.target is None or conn.target.decl_id in seen:
                continue
            if match_type(from_type, conn.target.declared, binding) is None:
                continue
            if not scope.contains_element(project, conn.target):
                continue
            if adapted is not None and adapted(usage):
                continue
            seen.add(conn.target.decl_id)
            elements.append(conn.target)
            edges.append(PropagationEdge(current, conn.target, conn.reason, conn.witness.id))
            work.append(conn.target)
    return Propagation(elements, edges)


def flow_sites(project: Project, element: RootElement, scope: Scope) -> list[Usage]:
    return find_references(project, element, scope) + incoming_values(project, element, scope)


def name_refs_in(project: Project, scope: Scope) -> Iterable[Node]:
    """Every reference-like node in scope; used by exhaustiveness checks."""
    for sf in project.parsed():
        for n in sf.unit.walk():
            if n.kind in ("NameRef", "FieldAccess") and scope.contains(n, sf.path):
                yield n


def is_expression(node: Node) -> bool:
    return node.kind in EXPRESSION_KINDS
