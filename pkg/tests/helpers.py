"""Shared helpers for building small Java projects in tests."""

from pathlib import Path

from retype.refgraph import Project, make_scope

FIXTURES = Path(__file__).parent / "fixtures"


def element_named(project, name, kind=None):
    hits = [project.element(d) for d in project.declarations() if d.text == name]
    hits = [e for e in hits if kind is None or e.kind == kind]
    assert len(hits) == 1, f"{name}: {hits}"
    return hits[0]


def java_class(body, imports=(), name="A", package="demo"):
    head = f"package {package};\n\n" if package else ""
    if imports:
        head += "".join(f"import {i};\n" for i in imports) + "\n"
    return f"{head}public class {name} {{\n{body}}}\n"


def write_tree(root: Path, files: dict) -> None:
    for rel, text in files.items():
        p = root / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_bytes(text.encode("utf-8"))


def read_tree(root: Path) -> dict:
    return {
        p.relative_to(root).as_posix(): p.read_bytes().decode("utf-8")
        for p in sorted(root.rglob("*.java"))
        if ".retype" not in p.parts
    }


def scope_of(project, element, kind="File"):
    return make_scope(project, element, kind)

