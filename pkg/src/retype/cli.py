"""Command-line front end: ``retype apply|preview|inspect|suggest|undo|list-patterns|validate-spec``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from pathlib import Path

from . import engine, modes
from .jparse import match_type, offset_of
from .refgraph import Project, RootElement, ScopeError, make_scope
from .specmodel import Catalog, SchemaError, TypeChangePattern, builtin_catalog, load_catalog, parse_type

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILURES = 2
EXIT_FINDINGS = 3


class UsageError(Exception):
    pass


# -- selectors ---------------------------------------------------------------------

def selector_for(project: Project, element: RootElement) -> str:
    """The ``file#Class.member[.var]`` selector naming ``element``."""
    decl = project.nodes[element.decl_id]
    names = list(modes.container_of(decl))
    if element.kind == "MethodReturn":
        names.append(element.name + "()")
    else:
        names.append(element.name)
    return f"{element.path}#{'.'.join(names)}"


def _decl_matches(project: Project, decl, names: list[str]) -> bool:
    element = project.element(decl)
    want = names[-1]
    if want.endswith("()"):
        if element.kind != "MethodReturn" or element.name != want[:-2]:
            return False
    elif element.name != want or (element.kind == "MethodReturn" and len(names) > 2):
        return False
    return list(modes.container_of(decl)) == names[:-1]


def resolve_root(project: Project, selector: str) -> RootElement:
    """Find the element named by ``file:line:col`` or ``file#Class.member[.var]``."""
    if "#" in selector:
        path, _, member = selector.partition("#")
        path = _project_path(project, path)
        names = member.split(".")
        hits = [d for d in project.declarations(path) if _decl_matches(project, d, names)]
        if len(hits) > 1:
            fields = [d for d in hits if project.element(d).kind == "Field"]
            hits = fields if len(fields) == 1 else hits
        if len(hits) != 1:
            raise UsageError(f"selector {selector!r} matches {len(hits)} declarations")
        return project.element(hits[0])
    m = re.fullmatch(r"(.+):(\d+):(\d+)", selector)
    if not m:
        raise UsageError(f"bad root selector {selector!r}")
    path = _project_path(project, m.group(1))
    offset = offset_of(project.files[path].text, int(m.group(2)), int(m.group(3)))
    best = None
    for decl in project.declarations(path):
        end = decl.body.start if decl.kind == "MethodDecl" and decl.body is not None else decl.end
        if decl.start <= offset < end and (best is None or decl.end - decl.start < best.end - best.start):
            best = decl
    if best is None:
        raise UsageError(f"no declaration at {selector}")
    return project.element(best)


def _project_path(project: Project, path: str) -> str:
    if path in project.files:
        return path
    if project.root is not None:
        p = Path(path)
        candidates = [p, Path.cwd() / p]
        for c in candidates:
            try:
                rel = c.resolve().relative_to(Path(project.root).resolve()).as_posix()
            except ValueError:
                continue
            if rel in project.files:
                return rel
    raise UsageError(f"{path} is not a Java file of the project")


def resolve_pattern(catalog: Catalog, selector: str) -> TypeChangePattern:
    if selector.strip().isdigit():
        p = catalog.by_id(int(selector))
        if p is None:
            raise UsageError(f"pattern not found: {selector}")
        return p
    if "=>" not in selector:
        raise UsageError(f"pattern not found: {selector}")
    left, right = (s.strip() for s in selector.split("=>", 1))
    try:
        src, dst = parse_type(left), parse_type(right)
    except ValueError as err:
        raise UsageError(str(err)) from None
    for p in catalog.ranked():
        if p.from_type == src and p.to_type == dst:
            return p
    raise UsageError(f"pattern not found: {selector}")


# -- helpers -------------------------------------------------------------------------

def load_catalog_arg(path: str | None, project: str | None = None) -> Catalog:
    """Catalog from the flag, ``$RETYPE_CATALOG``, ``<project>/typechanges.json`` or the built-in one."""
    path = path or os.environ.get("RETYPE_CATALOG")
    if not path and project is not None and (Path(project) / "typechanges.json").is_file():
        path = str(Path(project) / "typechanges.json")
    if not path:
        return builtin_catalog()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise UsageError(f"cannot read catalog: {err}") from None
    return load_catalog(text)


def load_project(path: str) -> Project:
    root = Path(path)
    if not root.is_dir():
        raise UsageError(f"project directory not found: {path}")
    return Project.load(root)


class Printer:
    def __init__(self, args, project_root: Path | None = None):
        self.json = args.format == "json"
        self.relative = args.relative
        self.root = project_root

    def path(self, rel: str) -> str:
        if self.relative or self.root is None:
            return rel
        return str((self.root / rel).resolve())

    def file(self, location: Path) -> str:
        if self.relative and self.root is not None:
            return os.path.relpath(location, self.root)
        return str(Path(location).resolve())

    def fix_paths(self, obj):
        if isinstance(obj, dict):
            return {k: self.path(v) if k == "file" and isinstance(v, str) else self.fix_paths(v) for k, v in obj.items()}
        if isinstance(obj, list):
            return [self.fix_paths(v) for v in obj]
        return obj

    def emit(self, obj) -> None:
        print(json.dumps(self.fix_paths(obj), sort_keys=False))


def _plan(project, args, catalog, retyped=False):
    root = resolve_root(project, args.root)
    pattern = resolve_pattern(catalog, args.pattern)
    scope = make_scope(project, root, args.scope)
    return engine.plan_migration(project, root, pattern, scope, retyped=retyped)


def _print_report(out: Printer, rep: dict, journal=None) -> None:
    if out.json:
        if journal is not None:
            rep = {**rep, "journal": out.file(journal.location)}
        out.emit(rep)
        return
    root = rep["root"]
    print(f"pattern {rep['pattern']}: {root['type']} {root['name']} (scope {rep['scope']})")
    print(f"elements: {len(rep['elements'])}")
    for e in rep["elements"]:
        print(f"  {e['kind']} {e['name']}  {out.path(e['file'])}")
    for edge in rep["edges"]:
        print(f"  {edge['from']} -> {edge['to']}  {edge['reason']} at {out.path(edge['file'])}:{edge['line']}:{edge['col']}")
    print(f"edits: {len(rep['edits'])}")
    for e in rep["edits"]:
        print(f"  {out.path(e['file'])}:{e['line']}:{e['col']}  {e['old']} -> {e['new']}")
    for e in rep["imports"]:
        for line in e["old"].splitlines():
            print(f"  - {line}")
        for line in e["new"].splitlines():
            if line.strip():
                print(f"  + {line}")
    print(f"failed usages: {len(rep['failed'])}")
    for f in rep["failed"]:
        print(f"  {out.path(f['file'])}:{f['line']}:{f['col']}  {f['text']}  {f['reason']}")
    if journal is not None:
        print(f"journal: {out.file(journal.location)}")


# -- commands ------------------------------------------------------------------------

def cmd_apply(args) -> int:
    project = load_project(args.project)
    catalog = load_catalog_arg(args.catalog, args.project)
    out = Printer(args, Path(args.project))
    plan = _plan(project, args, catalog, args.already_retyped)
    rep = engine.report(project, plan)
    if args.dry_run or args.command == "preview":
        _print_report(out, rep) if out.json else sys.stdout.write(engine.preview(project, plan))
        if not out.json:
            _print_failed(out, rep)
        return EXIT_FAILURES if plan.failed else EXIT_OK
    journal = engine.apply_plan(project, plan)
    _print_report(out, rep, journal)
    return EXIT_FAILURES if plan.failed else EXIT_OK


def _print_failed(out: Printer, rep: dict) -> None:
    for f in rep["failed"]:
        print(f"# failed {out.path(f['file'])}:{f['line']}:{f['col']}  {f['text']}  {f['reason']}")


def cmd_inspect(args) -> int:
    project = load_project(args.project)
    catalog = load_catalog_arg(args.catalog, args.project)
    out = Printer(args, Path(args.project))
    found = modes.inspect(project, catalog)
    if args.fix:
        return _fix_all(project, catalog, found, args, out)
    for d in found:
        selector = selector_for(project, d.root)
        if out.json:
            out.emit({"file": d.path, "line": d.line, "col": d.col, "patternId": d.pattern_id,
                      "message": d.message, "fix": {"root": selector, "pattern": d.pattern_id}})
        else:
            print(f"{out.path(d.path)}:{d.line}:{d.col}: {d.severity}: {d.message} [pattern {d.pattern_id}]")
            print(f"  fix: retype apply --project {args.project} --root '{selector}' --pattern {d.pattern_id}")
    return EXIT_FINDINGS if found else EXIT_OK


def _fix_all(project, catalog, found, args, out) -> int:
    """Apply each diagnostic's quick fix in turn, reloading between fixes."""
    targets = [(selector_for(project, d.root), d.pattern_id) for d in found]
    status = EXIT_OK
    for selector, pattern_id in targets:
        project = load_project(args.project)
        pattern = catalog.by_id(pattern_id)
        try:
            root = resolve_root(project, selector)
        except UsageError:
            continue
        if match_type(pattern.from_type, root.declared) is None:
            continue  # already migrated by an earlier fix
        plan = engine.plan_migration(project, root, pattern, make_scope(project, root, "File"))
        journal = engine.apply_plan(project, plan)
        _print_report(out, engine.report(project, plan), journal)
        if plan.failed:
            status = EXIT_FAILURES
    return status


def cmd_suggest(args) -> int:
    catalog = load_catalog_arg(args.catalog, args.project)
    out = Printer(args, Path(args.project))
    try:
        old = Path(args.old).read_bytes().decode("utf-8")
        new = Path(args.new).read_bytes().decode("utf-8")
    except OSError as err:
        raise UsageError(str(err)) from None
    project = None
    path = Path(args.new).name
    if Path(args.project).is_dir():
        project = Project.load(args.project)
        try:
            path = _project_path(project, args.new)
        except UsageError:
            project = None
    for label, text in (("old", old), ("new", new)):
        error = Project({path: text}).files[path].error
        if error is not None:
            raise UsageError(f"--{label} does not parse: {error}")
    found = modes.detect_manual_type_edit(old, new, catalog, path=path, project=project)
    for s in found:
        owner = project if project is not None else Project({path: new})
        selector = selector_for(owner, s.root)
        command = (f"retype apply --project {args.project} --root '{selector}' "
                   f"--pattern {s.pattern_id} --already-retyped")
        if out.json:
            out.emit({"file": s.path, "element": s.root.name, "patternId": s.pattern_id,
                      "old": str(s.old_type), "new": str(s.new_type), "remaining": s.remaining, "command": command})
        else:
            print(f"{out.path(s.path)}: {s.root.name} changed {s.old_type} -> {s.new_type}; "
                  f"{s.remaining} usage(s) to update [pattern {s.pattern_id}]")
            print(f"  run: {command}")
    return EXIT_FINDINGS if found else EXIT_OK


def cmd_undo(args) -> int:
    if args.journal:
        journal = engine.EditJournal.load(args.journal)
    else:
        journal = engine.EditJournal.latest(args.project)
        if journal is None:
            raise UsageError("no journal to undo")
    out = Printer(args, journal.project_root)
    for path in engine.undo(journal):
        print(f"restored {out.path(path)}")
    return EXIT_OK


def cmd_list_patterns(args) -> int:
    catalog = load_catalog_arg(args.catalog, args.project)
    for p in catalog.ranked():
        if args.format == "json":
            print(json.dumps({"id": p.id, "from": str(p.from_type), "to": str(p.to_type), "mode": p.mode.value,
                              "priority": p.priority, "rules": len(p.rules)}))
        else:
            print(f"{p.id}  {p.from_type} => {p.to_type}  {p.mode.value}  p{p.priority}  {len(p.rules)} rules")
    return EXIT_OK


def cmd_validate_spec(args) -> int:
    path = args.path or args.catalog
    if not path:
        raise UsageError("validate-spec needs a catalog path")
    try:
        text = Path(path).read_bytes()
    except OSError as err:
        raise UsageError(f"cannot read catalog: {err}") from None
    try:
        catalog = load_catalog(text)
    except SchemaError as err:
        for p in err.problems:
            print(p)
        return EXIT_ERROR
    print(f"OK ({len(catalog)} patterns)")
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--project", default=".", help="project root directory")
    common.add_argument("--catalog", help="catalog JSON (default: $RETYPE_CATALOG or built-in)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--relative", action="store_true", help="print project-relative paths")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="retype", description="Rule-driven type migration for Java sources.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("apply", "plan and apply a type change"), ("preview", "print the diff a type change would make")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--root", required=True, help="file:line:col or file#Class.member[.var]")
        p.add_argument("--pattern", required=True, help="pattern id or 'From=>To'")
        p.add_argument("--scope", choices=("local", "file", "project"), default="file")
        p.add_argument("--dry-run", action="store_true")
        p.add_argument("--already-retyped", action="store_true",
                       help="the root declaration already has the target type")
        p.set_defaults(func=cmd_apply)

    p = sub.add_parser("inspect", parents=[common], help="flag declarations of discouraged types")
    p.add_argument("--fix", action="store_true", help="apply every quick fix")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("suggest", parents=[common], help="detect a manual type edit between two versions")
    p.add_argument("--old", required=True)
    p.add_argument("--new", required=True)
    p.set_defaults(func=cmd_suggest)

    p = sub.add_parser("undo", parents=[common], help="revert the latest (or given) applied change")
    p.add_argument("--journal")
    p.set_defaults(func=cmd_undo)

    p = sub.add_parser("list-patterns", parents=[common], help="list catalog patterns by priority")
    p.set_defaults(func=cmd_list_patterns)

    p = sub.add_parser("validate-spec", parents=[common], help="validate a catalog file")
    p.add_argument("path", nargs="?")
    p.set_defaults(func=cmd_validate_spec)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, SchemaError, ScopeError, engine.EngineError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
