"""Planning, applying and undoing one type change."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from filelock import FileLock

from .jparse import (
    BUILTIN_TYPES,
    Edit,
    LexError,
    Node,
    ParseError,
    TypeRef,
    apply_edits,
    contains,
    line_col,
    match_type,
    parse_compilation_unit,
    tokenize,
)
from .jparse.edits import check_disjoint
from .refgraph import (
    Project,
    RootElement,
    Scope,
    ScopeError,
    Usage,
    connection,
    digest,
    flow_sites,
    propagate,
)
from .specmodel import RewriteRule, TypeChangePattern
from .template import Bindings, context_precedence, match, substitute

log = logging.getLogger(__name__)

FAILURE_REASONS = ("NoMatchingRule", "OpaqueContext", "OutOfScope", "AmbiguousOverload")
JOURNAL_DIR = Path(".retype") / "journal"


class EngineError(Exception):
    pass


class PatternMismatch(EngineError):
    pass


class StaleFile(EngineError):
    pass


class ReparseFailure(EngineError):
    pass


class JournalConsumed(EngineError):
    pass


@dataclass(frozen=True, eq=False)
class RuleMatch:
    usage: Usage
    node: Node
    pattern_id: int
    rule: RewriteRule
    bindings: Bindings
    score: int

    @property
    def rule_index(self) -> int:
        return self.rule.index


@dataclass
class Outcome:
    usage: Usage
    status: str  # rewritten | covered | failed
    reason: str
    match: RuleMatch | None = None


# -- rule selection -------------------------------------------------------------

def candidate_nodes(usage: Usage) -> list[Node]:
    """The usage site and its expression ancestors, innermost first."""
    if usage.role == "value":
        return [usage.site]
    nodes = [usage.site]
    while nodes[-1].parent is not None and nodes[-1].parent.is_expression:
        nodes.append(nodes[-1].parent)
    return nodes


def root_predicate(project: Project, element: RootElement):
    return lambda n: project.ref_decl(n) == element.decl_id


def select_rule(project: Project, usage: Usage, pattern: TypeChangePattern) -> RuleMatch | None:
    """Pick the rule matching the most concrete tokens at the usage or above it.

    Ties go to the candidate higher in the tree, then to the earlier rule.
    """
    is_root = root_predicate(project, usage.element)
    best = None
    best_key = None
    for height, node in enumerate(candidate_nodes(usage)):
        for rule in pattern.rules:
            bindings = match(rule.before, node, is_root)
            if bindings is None:
                continue
            key = (_score(rule), height, -rule.index)
            if best_key is None or key > best_key:
                best_key = key
                best = RuleMatch(usage, node, pattern.id, rule, bindings, key[0])
    return best


def _score(rule: RewriteRule) -> int:
    return rule.before.concrete_tokens


# -- plan -----------------------------------------------------------------------

@dataclass
class MigrationPlan:
    pattern_id: int
    scope: Scope
    root: RootElement
    elements: list[RootElement]
    edges: list
    outcomes: list[Outcome]
    declaration_edits: list[Edit] = field(default_factory=list)
    rewrite_edits: list[Edit] = field(default_factory=list)
    import_edits: list[Edit] = field(default_factory=list)
    snapshot: dict[str, str] = field(default_factory=dict)

    @property
    def edits(self) -> list[Edit]:
        return self.declaration_edits + self.rewrite_edits + self.import_edits

    @property
    def failed(self) -> list[tuple[Usage, str]]:
        return [(o.usage, o.reason) for o in self.outcomes if o.status == "failed"]

    def count(self, status: str) -> int:
        return sum(1 for o in self.outcomes if o.status == status)

    @property
    def paths(self) -> list[str]:
        return sorted({e.path for e in self.edits})

    def edits_for(self, path: str) -> list[Edit]:
        return [e for e in self.edits if e.path == path]

    def check_invariants(self) -> None:
        for path in self.paths:
            check_disjoint(self.edits_for(path))
        keys = [(o.usage.role, o.usage.site.id, o.usage.element.decl_id) for o in self.outcomes]
        assert len(keys) == len(set(keys)), "usage listed twice"
        assert len(self.outcomes) == self.count("rewritten") + self.count("covered") + self.count("failed")


def _is_null(node: Node) -> bool:
    return node.kind == "Literal" and node.text == "null"


def _classify(project, usage, pattern, members, scope, binding, claimed) -> Outcome:
    if usage.opaque:
        return Outcome(usage, "failed", "OpaqueContext")
    if usage.ambiguous:
        return Outcome(usage, "failed", "AmbiguousOverload")
    site = usage.site
    if usage.role == "value":
        if project.ref_decl(site) in members:
            return Outcome(usage, "covered", "propagated")
        if _is_null(site) or site.kind in ("Lambda", "MethodRef"):
            return Outcome(usage, "covered", "neutral")
    m = select_rule(project, usage, pattern)
    if m is not None:
        if m.node.id in claimed:
            return Outcome(usage, "covered", "ancestor", m)
        claimed[m.node.id] = m
        return Outcome(usage, "rewritten", "rule", m)
    conn = connection(project, usage)
    if conn is not None:
        if conn.ambiguous:
            return Outcome(usage, "failed", "AmbiguousOverload")
        target = conn.target
        if target is not None and target.decl_id in members:
            return Outcome(usage, "covered", "propagated")
        if (
            target is not None
            and match_type(pattern.from_type, target.declared, binding) is not None
            and not scope.contains_element(project, target)
        ):
            return Outcome(usage, "failed", "OutOfScope")
    parent = usage.parent
    if parent is not None and parent.kind == "Assignment" and parent.text == "=" and parent.children[0] is site:
        return Outcome(usage, "covered", "write")
    if parent is not None and parent.kind == "Binary" and parent.text in ("==", "!="):
        other = parent.children[1] if parent.children[0] is site else parent.children[0]
        if _is_null(other) or project.ref_decl(other) in members:
            return Outcome(usage, "covered", "neutral")
    return Outcome(usage, "failed", "NoMatchingRule")


def _co_declared(project: Project, element: RootElement) -> list[RootElement]:
    decl = project.nodes[element.decl_id]
    if decl.kind not in ("FieldDecl", "LocalVarDecl") or decl.parent is None:
        return []
    span = decl.typeref().span
    out = []
    for sib in decl.parent.children:
        if sib is not decl and sib.kind == decl.kind and sib.typeref() is not None and sib.typeref().span == span:
            el = project.element(sib)
            if el is not None:
                out.append(el)
    return out


def plan_migration(
    project: Project,
    root: RootElement,
    pattern: TypeChangePattern,
    scope: Scope,
    *,
    retyped: bool = False,
) -> MigrationPlan:
    """Work out every edit for changing ``root`` (and what it drags along).

    With ``retyped`` the root's declaration already carries the target type
    (a manual edit was detected); its own declaration is left alone.
    """
    if scope.kind == "Local" and root.kind in ("Field", "MethodReturn"):
        raise ScopeError(f"Local scope is not available for a {root.kind} root")
    declared_pattern = pattern.to_type if retyped else pattern.from_type
    binding = match_type(declared_pattern, root.declared)
    if binding is None:
        raise PatternMismatch(f"{root.name} has type {root.declared}, pattern {pattern.id} expects {declared_pattern}")

    def adapted(usage: Usage) -> bool:
        return select_rule(project, usage, pattern) is not None

    prop = propagate(project, root, scope, pattern.from_type, binding, adapted)
    elements = list(prop.elements)
    ids = {e.decl_id for e in elements}
    for e in list(elements):
        for sib in _co_declared(project, e):
            if sib.decl_id not in ids:
                ids.add(sib.decl_id)
                elements.append(sib)

    claimed: dict[int, RuleMatch] = {}
    outcomes = []
    for e in elements:
        for usage in flow_sites(project, e, scope):
            outcomes.append(_classify(project, usage, pattern, ids, scope, binding, claimed))

    plan = MigrationPlan(pattern.id, scope, root, elements, prop.edges, outcomes)
    _build_edits(project, plan, pattern, binding, retyped)
    plan.check_invariants()
    return plan


# -- edit construction ------------------------------------------------------------

@dataclass(eq=False)
class _Item:
    start: int
    end: int
    text: str | None = None
    match: RuleMatch | None = None

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


class _ImportContext:
    """Chooses how to spell a type in one file and records imports to add."""

    def __init__(self, unit: Node, pattern: TypeChangePattern):
        self.package = unit.text
        self.explicit: dict[str, str] = {}
        self.wildcards: set[str] = set()
        self.unit_children = list(unit.children)
        self.imports = [c for c in unit.children if c.kind == "Import"]
        for imp in self.imports:
            if "static" in imp.mods:
                continue
            if imp.text.endswith(".*"):
                self.wildcards.add(imp.text[:-2])
            else:
                self.explicit[imp.text.rsplit(".", 1)[-1]] = imp.text
        self.local_classes = {c.text for c in unit.children if c.kind == "ClassDecl"}
        self.hints = {pattern.to_type.simple: pattern.to_type.fqn, pattern.from_type.simple: pattern.from_type.fqn}
        self.needed: set[str] = set()

    def qualify(self, simple: str) -> str | None:
        if simple in self.explicit:
            return self.explicit[simple]
        return self.hints.get(simple) or BUILTIN_TYPES.get(simple)

    def spell(self, fqn: str) -> str:
        if "." not in fqn:
            return fqn
        pkg, simple = fqn.rsplit(".", 1)
        if pkg == "java.lang" or self.explicit.get(simple) == fqn:
            return simple
        if simple in self.explicit or simple in self.local_classes:
            return fqn
        if pkg not in self.wildcards and pkg != self.package:
            self.needed.add(fqn)
        return simple

    def spell_type(self, t: TypeRef, binding: dict) -> str:
        if t.is_type_var and t.fqn in binding:
            bound = binding[t.fqn]
            return bound.raw or str(bound)
        if t.fqn in ("? extends", "? super"):
            return f"{t.fqn} {self.spell_type(t.args[0], binding)}"
        text = self.spell(t.fqn)
        if t.args:
            text += "<" + ", ".join(self.spell_type(a, binding) for a in t.args) + ">"
        return text + "[]" * t.dims

    def note_template(self, body: Node) -> None:
        """Register types an after-template introduces by simple name."""
        for n in body.walk():
            if n.kind == "NameRef" and n.text[:1].isupper() and n.parent is not None and n.parent.receiver is n:
                fqn = self.qualify(n.text)
                if fqn is not None:
                    self.spell(fqn)
            elif n.kind == "TypeRef":
                self._note_type(n.type)

    def _note_type(self, t: TypeRef) -> None:
        if t.fqn in ("? extends", "? super"):
            self._note_type(t.args[0])
            return
        fqn = t.fqn if "." in t.fqn else self.qualify(t.fqn)
        if fqn is not None:
            self.spell(fqn)
        for a in t.args:
            self._note_type(a)


def _render(source: str, start: int, end: int, items: list[_Item], dropped: set) -> str:
    inside = [i for i in items if start <= i.start and i.end <= end]
    tops = [
        i for i in inside
        if not any(o is not i and contains(o.span, i.span) and o.span != i.span for o in inside)
    ]
    tops.sort(key=lambda i: i.start)
    out = []
    prev = start
    for item in tops:
        out.append(source[prev : item.start])
        out.append(_item_text(source, item, inside, dropped))
        prev = item.end
    out.append(source[prev:end])
    return "".join(out)


def _item_text(source: str, item: _Item, items: list[_Item], dropped: set) -> str:
    if item.match is None:
        return item.text
    m = item.match
    inner = [i for i in items if i is not item and contains(item.span, i.span)]
    bound = list(m.bindings.values())
    for i in inner:
        if not any(contains(b.span, i.span) for b in bound):
            dropped.add(id(i))

    def render(node: Node) -> str:
        return _render(source, node.start, node.end, [i for i in inner if contains(node.span, i.span)], dropped) \
            if any(contains(node.span, i.span) for i in inner) else source[node.start : node.end]

    return substitute(m.rule.after, m.bindings, source, context=context_precedence(m.node), render=render)


def _declared_text(element: RootElement, pattern: TypeChangePattern, binding: dict, ctx: _ImportContext) -> str:
    text = ctx.spell_type(pattern.to_type, binding)
    declared = element.declared
    if not pattern.from_type.args and not pattern.to_type.args and declared.args and "<" in declared.raw:
        text += declared.raw[declared.raw.index("<") : declared.raw.rindex(">") + 1]
    return text


def _build_edits(project: Project, plan: MigrationPlan, pattern, binding, retyped: bool) -> None:
    per_file: dict[str, list[_Item]] = {}
    contexts: dict[str, _ImportContext] = {}

    def ctx_for(path: str) -> _ImportContext:
        if path not in contexts:
            contexts[path] = _ImportContext(project.unit_of(path), pattern)
        return contexts[path]

    seen_spans = set()
    for e in plan.elements:
        if retyped and e == plan.root:
            continue
        tnode = project.nodes[e.decl_id].typeref()
        key = (e.path, tnode.span)
        if key in seen_spans:
            continue
        seen_spans.add(key)
        text = _declared_text(e, pattern, binding, ctx_for(e.path))
        per_file.setdefault(e.path, []).append(_Item(tnode.start, tnode.end, text=text))
    for o in plan.outcomes:
        if o.status == "rewritten":
            per_file.setdefault(o.usage.path, []).append(_Item(o.match.node.start, o.match.node.end, match=o.match))

    decl_edits, rewrite_edits, import_edits = [], [], []
    for path in sorted(per_file):
        source = project.files[path].text
        items = per_file[path]
        ctx = ctx_for(path)
        dropped: set[int] = set()
        tops = [i for i in items if not any(o is not i and contains(o.span, i.span) for o in items)]
        texts = {id(i): _item_text(source, i, items, dropped) for i in sorted(tops, key=lambda i: i.start)}
        for item in items:
            if item.match is not None and id(item) not in dropped:
                ctx.note_template(item.match.rule.after.body)
        for item in sorted(tops, key=lambda i: i.start):
            edit = Edit(path, item.start, item.end, texts[id(item)])
            (rewrite_edits if item.match is not None else decl_edits).append(edit)
        for o in plan.outcomes:
            if o.status == "rewritten" and o.usage.path == path:
                item = next(i for i in items if i.match is o.match)
                if id(item) in dropped:
                    o.status, o.reason = "covered", "ancestor"
        body = apply_edits(source, [e for e in decl_edits + rewrite_edits if e.path == path])
        import_edits.extend(_import_edits(path, source, body, ctx, pattern))
        plan.snapshot[path] = digest(source)
    plan.declaration_edits = decl_edits
    plan.rewrite_edits = rewrite_edits
    plan.import_edits = import_edits


def _line_span(source: str, node: Node) -> tuple[int, int]:
    start = source.rfind("\n", 0, node.start) + 1
    if source[start : node.start].strip():
        return node.span
    m = re.compile(r"[ \t]*\r?\n").match(source, node.end)
    return (start, m.end() if m else node.end)


def _import_edits(path: str, source: str, body: str, ctx: _ImportContext, pattern) -> list[Edit]:
    imports = ctx.imports
    edits = []
    last_import_end = max((i.end for i in imports), default=0)
    remove = set()
    from_fqn = pattern.from_type.fqn
    simple = pattern.from_type.simple
    if ctx.explicit.get(simple) == from_fqn:
        still_used = any(
            t.kind == "identifier" and t.text == simple and t.start >= last_import_end for t in _safe_tokens(body)
        )
        if not still_used:
            remove.add(from_fqn)
    for imp in imports:
        if imp.text in remove and "static" not in imp.mods:
            start, end = _line_span(source, imp)
            edits.append(Edit(path, start, end, ""))

    add = sorted(ctx.needed - set(ctx.explicit.values()))
    if not add:
        return edits
    nl = "\r\n" if "\r\n" in source else "\n"
    plain = [i for i in imports if "static" not in i.mods]
    groups: dict[int, list[str]] = {}
    if imports:
        for name in add:
            anchor = next((i for i in plain if i.text > name), None)
            if anchor is not None:
                offset = _line_span(source, anchor)[0]
            else:
                offset = _line_span(source, (plain or imports)[-1])[1]
            groups.setdefault(offset, []).append(name)
        for offset, names in groups.items():
            prefix = "" if offset == 0 or source[offset - 1] == "\n" else nl
            edits.append(Edit(path, offset, offset, prefix + "".join(f"import {n};{nl}" for n in names)))
        return edits
    unit_children = ctx.unit_children
    package = next((c for c in unit_children if c.kind == "Package"), None)
    lines = nl.join(f"import {n};" for n in add)
    if package is not None:
        edits.append(Edit(path, package.end, package.end, nl + nl + lines))
    else:
        first = next((c for c in unit_children if c.kind != "Package"), None)
        offset = first.start if first is not None else 0
        edits.append(Edit(path, offset, offset, lines + nl + nl))
    return edits


def _safe_tokens(text: str):
    try:
        return tokenize(text)
    except LexError:
        return []


# -- apply, journal, undo ---------------------------------------------------------

@dataclass
class JournalFile:
    path: str
    pre_hash: str
    post_hash: str
    original_content: str


@dataclass
class EditJournal:
    timestamp: str
    pattern_id: int | None
    files: list[JournalFile]
    summary: dict = field(default_factory=dict)
    consumed: bool = False
    location: Path | None = None

    def to_json(self) -> str:
        data = {
            "timestamp": self.timestamp,
            "pattern_id": self.pattern_id,
            "consumed": self.consumed,
            "summary": self.summary,
            "files": [vars(f) for f in self.files],
        }
        return json.dumps(data, indent=2) + "\n"

    def save(self) -> None:
        self.location.parent.mkdir(parents=True, exist_ok=True)
        self.location.write_text(self.to_json(), encoding="utf-8")

    @property
    def project_root(self) -> Path:
        return self.location.parents[2]

    @classmethod
    def load(cls, path: str | Path) -> EditJournal:
        path = Path(path)
        data = json.loads(path.read_text(encoding="utf-8"))
        files = [JournalFile(**f) for f in data["files"]]
        return cls(data["timestamp"], data["pattern_id"], files, data.get("summary", {}), data["consumed"], path)

    @classmethod
    def latest(cls, root: str | Path) -> EditJournal | None:
        """Most recent journal of ``root`` that has not been undone."""
        folder = Path(root) / JOURNAL_DIR
        for path in sorted(folder.glob("*.json"), reverse=True):
            journal = cls.load(path)
            if not journal.consumed:
                return journal
        return None


def _lock(root: Path) -> FileLock:
    (root / ".retype").mkdir(parents=True, exist_ok=True)
    return FileLock(str(root / ".retype" / "lock"))


def _read(path: Path) -> str:
    return path.read_bytes().decode("utf-8")


def _write(path: Path, text: str) -> None:
    path.write_bytes(text.encode("utf-8"))


def _write_all(root: Path, texts: dict[str, str], originals: dict[str, str]) -> None:
    """Write every file or, if one write fails, restore the ones already written."""
    written = []
    try:
        for rel, text in texts.items():
            _write(root / rel, text)
            written.append(rel)
    except OSError:
        for rel in written:
            _write(root / rel, originals[rel])
        raise


def new_texts(project: Project, plan: MigrationPlan) -> dict[str, str]:
    return {path: apply_edits(project.files[path].text, plan.edits_for(path)) for path in plan.paths}


def apply_plan(project: Project, plan: MigrationPlan) -> EditJournal:
    """Write the plan to disk; all files change or none do."""
    if project.root is None:
        raise EngineError("project has no root directory")
    root = Path(project.root)
    with _lock(root):
        originals = {}
        for path in plan.paths:
            disk = _read(root / path)
            if digest(disk) != plan.snapshot[path]:
                raise StaleFile(f"{path} changed since the plan was made")
            originals[path] = disk
        texts = new_texts(project, plan)
        for path, text in texts.items():
            try:
                parse_compilation_unit(text)
            except (LexError, ParseError) as err:
                raise ReparseFailure(f"{path} does not parse after the edit: {err}") from None
        _write_all(root, texts, originals)
        journal = EditJournal(
            _timestamp(),
            plan.pattern_id,
            [JournalFile(p, digest(originals[p]), digest(texts[p]), originals[p]) for p in texts],
            summary=summary(plan),
        )
        journal.location = _journal_path(root, journal.timestamp)
        journal.save()
    log.info("applied pattern %s to %d file(s)", plan.pattern_id, len(texts))
    return journal


def _timestamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")


def _journal_path(root: Path, stamp: str) -> Path:
    folder = root / JOURNAL_DIR
    path = folder / f"{stamp}.json"
    n = 1
    while path.exists():
        path = folder / f"{stamp}-{n}.json"
        n += 1
    return path


def undo(journal: EditJournal) -> list[str]:
    """Restore the files a journal recorded. Returns the restored paths."""
    root = journal.project_root
    with _lock(root):
        current = EditJournal.load(journal.location)
        if current.consumed:
            raise JournalConsumed(f"{journal.location.name} was already undone")
        originals = {}
        for f in current.files:
            disk = _read(root / f.path)
            if digest(disk) != f.post_hash:
                raise StaleFile(f"{f.path} changed after the edit was applied")
            originals[f.path] = disk
        _write_all(root, {f.path: f.original_content for f in current.files}, originals)
        current.consumed = True
        current.save()
    journal.consumed = True
    return [f.path for f in current.files]


# -- reporting ----------------------------------------------------------------------

def preview(project: Project, plan: MigrationPlan) -> str:
    """Unified diff of the plan."""
    import difflib

    chunks = []
    for path, text in new_texts(project, plan).items():
        old = project.files[path].text
        chunks.extend(
            difflib.unified_diff(
                old.splitlines(keepends=True), text.splitlines(keepends=True), f"a/{path}", f"b/{path}"
            )
        )
    return "".join(chunks)


def _where(project: Project, path: str, offset: int) -> dict:
    line, col = line_col(project.files[path].text, offset)
    return {"file": path, "line": line, "col": col}


def summary(plan: MigrationPlan) -> dict:
    return {
        "elements": len(plan.elements),
        "edits": len(plan.declaration_edits) + len(plan.rewrite_edits),
        "imports": len(plan.import_edits),
        "rewritten": plan.count("rewritten"),
        "covered": plan.count("covered"),
        "failed": plan.count("failed"),
    }


def report(project: Project, plan: MigrationPlan) -> dict:
    """A JSON-ready description of the plan."""

    def edit_row(e: Edit, kind: str) -> dict:
        return {**_where(project, e.path, e.start), "kind": kind,
                "old": project.files[e.path].text[e.start : e.end], "new": e.replacement}

    root = plan.root
    return {
        "pattern": plan.pattern_id,
        "scope": plan.scope.kind,
        "root": {"kind": root.kind, "name": root.name, "type": str(root.declared), "file": root.path},
        "elements": [{"kind": e.kind, "name": e.name, "type": str(e.declared), "file": e.path} for e in plan.elements],
        "edges": [
            {"from": edge.source.name, "to": edge.target.name, "reason": edge.reason,
             **_where(project, project.node_path[edge.witness], project.nodes[edge.witness].start)}
            for edge in plan.edges
        ],
        "edits": [edit_row(e, "declaration") for e in plan.declaration_edits]
        + [edit_row(e, "rewrite") for e in plan.rewrite_edits],
        "imports": [edit_row(e, "import") for e in plan.import_edits],
        "failed": [
            {**_where(project, u.path, u.site.start), "element": u.element.name,
             "text": project.files[u.path].text[u.site.start : u.site.end], "reason": reason}
            for u, reason in plan.failed
        ],
        "summary": summary(plan),
    }
