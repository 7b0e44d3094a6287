"""Proactive surfacing: inspections and suggestions after a manual type edit."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .jparse import Node, TypeRef, line_col, match_type
from .refgraph import Project, RootElement, find_references, make_scope
from .specmodel import Catalog, Mode, TypeChangePattern, message_for

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Diagnostic:
    path: str
    start: int
    end: int
    line: int
    col: int
    pattern_id: int
    message: str
    root: RootElement
    severity: str = "warning"

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class Suggestion:
    path: str
    root: RootElement
    pattern_id: int
    old_type: TypeRef
    new_type: TypeRef
    remaining: int


def inspect(project: Project, catalog: Catalog) -> list[Diagnostic]:
    """Flag every declaration whose type an Inspection-mode pattern targets."""
    patterns = catalog.by_mode(Mode.INSPECTION)
    found = []
    for decl in project.declarations():
        element = project.element(decl)
        tnode = decl.typeref()
        for p in patterns:
            if match_type(p.from_type, element.declared) is None:
                continue
            line, col = line_col(project.files[element.path].text, tnode.start)
            found.append(Diagnostic(element.path, tnode.start, tnode.end, line, col, p.id, message_for(p), element))
    found.sort(key=lambda d: (d.path, d.start))
    return found


def container_of(decl: Node) -> tuple[str, ...]:
    """Names of the classes and method enclosing a declaration, outermost first."""
    names = []
    for a in decl.ancestors():
        if a.kind == "ClassDecl" or (a.kind == "MethodDecl" and a is not decl):
            names.append(a.text)
    return tuple(reversed(names))


def declaration_key(element: RootElement, decl: Node) -> tuple:
    return (element.kind, element.name, container_of(decl))


def _index(project: Project) -> dict[tuple, RootElement]:
    index: dict[tuple, RootElement | None] = {}
    for decl in project.declarations():
        element = project.element(decl)
        key = declaration_key(element, decl)
        index[key] = None if key in index else element
    return {k: v for k, v in index.items() if v is not None}


def _version(path: str, text: str) -> Project | None:
    project = Project({path: text})
    if project.files[path].error is not None:
        log.warning("cannot compare %s: %s", path, project.files[path].error)
        return None
    return project


def retyped_by(pattern: TypeChangePattern, old: TypeRef, new: TypeRef) -> bool:
    binding = match_type(pattern.from_type, old)
    return binding is not None and match_type(pattern.to_type, new, binding) is not None


def detect_manual_type_edit(
    old_source: str, new_source: str, catalog: Catalog, *, path: str = "Source.java", project: Project | None = None
) -> list[Suggestion]:
    """Suggest completing a type change the user started by hand.

    Declarations are paired across versions by kind, name and container.
    ``project`` (the new state of the whole project) widens the usage count
    beyond the edited file.
    """
    old = _version(path, old_source)
    new = _version(path, new_source)
    if old is None or new is None:
        return []
    if project is not None and path in project.files and project.files[path].text == new_source:
        new = project
    before = _index(old)
    after = _index(new)
    patterns = catalog.by_mode(Mode.SUGGESTED)
    out = []
    for key, element in after.items():
        previous = before.get(key)
        if previous is None or previous.declared == element.declared:
            continue
        for p in patterns:
            if retyped_by(p, previous.declared, element.declared):
                remaining = len(find_references(new, element, make_scope(new, element, "Project")))
                out.append(Suggestion(path, element, p.id, previous.declared, element.declared, remaining))
    out.sort(key=lambda s: new.nodes[s.root.decl_id].start)
    return out
