"""Loading and querying the catalog of type-change patterns.

The on-disk format is a JSON array of pattern objects::

    [{"From": "java.io.File", "To": "java.nio.file.Path", "ID": 1,
      "Priority": 2, "Mode": "Suggested Refactoring",
      "Rules": [{"Before": "$1$.exists()", "After": "Files.exists($1$)"}]}]
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources

import jsonschema

from .jparse import LexError, ParseError, TypeRef, match_type
from .jparse.parser import Parser
from .template import Template, TemplateError, parse_template

DEFAULT_MESSAGE = "Type change recommended"

SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["From", "To", "ID", "Priority", "Rules"],
        "additionalProperties": False,
        "properties": {
            "From": {"type": "string", "minLength": 1},
            "To": {"type": "string", "minLength": 1},
            "ID": {"type": "integer", "minimum": 1},
            "Priority": {"type": "integer", "minimum": 1},
            "Mode": {"enum": ["Classic", "Suggested Refactoring", "Inspection"]},
            "Message": {"type": "string"},
            "Rules": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["Before", "After"],
                    "additionalProperties": False,
                    "properties": {"Before": {"type": "string"}, "After": {"type": "string"}},
                },
            },
        },
    },
}


class Mode(str, Enum):
    CLASSIC = "Classic"
    SUGGESTED = "Suggested Refactoring"
    INSPECTION = "Inspection"


@dataclass(frozen=True)
class Problem:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


class SchemaError(Exception):
    def __init__(self, problems: list[Problem]):
        self.problems = problems
        super().__init__("\n".join(str(p) for p in problems))


@dataclass(frozen=True)
class RewriteRule:
    before: Template
    after: Template
    index: int


@dataclass(frozen=True)
class TypeChangePattern:
    id: int
    from_type: TypeRef
    to_type: TypeRef
    priority: int
    mode: Mode
    rules: tuple[RewriteRule, ...]
    message: str | None = None

    def __str__(self) -> str:
        return f"{self.from_type} => {self.to_type}"


@dataclass(frozen=True)
class Catalog:
    patterns: tuple[TypeChangePattern, ...] = ()

    def __iter__(self):
        return iter(self.patterns)

    def __len__(self) -> int:
        return len(self.patterns)

    def ranked(self) -> list[TypeChangePattern]:
        return sorted(self.patterns, key=lambda p: (p.priority, p.id))

    def by_id(self, pattern_id: int) -> TypeChangePattern | None:
        return next((p for p in self.patterns if p.id == pattern_id), None)

    def by_mode(self, mode: Mode) -> list[TypeChangePattern]:
        return [p for p in self.ranked() if p.mode == mode]

    def patterns_for_source_type(self, t: TypeRef) -> list[TypeChangePattern]:
        return [p for p in self.ranked() if match_type(p.from_type, t) is not None]


def patterns_for_source_type(catalog: Catalog, t: TypeRef) -> list[TypeChangePattern]:
    return catalog.patterns_for_source_type(t)


def parse_type(text: str) -> TypeRef:
    """Parse a catalog type such as ``java.util.function.Function<T, Boolean>``."""
    try:
        p = Parser(text)
        t = p.parse_type()
    except (LexError, ParseError) as err:
        raise ValueError(f"bad type {text!r}: {err}") from None
    if p.peek() is not None:
        raise ValueError(f"bad type {text!r}: trailing input")
    return t


def _json_path(parts) -> str:
    out = ""
    for part in parts:
        out += f"[{part}]" if isinstance(part, int) else f".{part}"
    return out or "$"


def load_catalog(document: str | bytes) -> Catalog:
    """Parse and validate a catalog document.

    Either returns a fully valid Catalog or raises SchemaError listing every
    problem found.
    """
    try:
        if isinstance(document, bytes):
            document = document.decode("utf-8")
        data = json.loads(document)
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise SchemaError([Problem("$", f"not valid JSON: {err}")]) from None

    validator = jsonschema.Draft202012Validator(SCHEMA)
    problems = []
    for err in sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path))):
        path = list(err.absolute_path)
        if err.validator == "additionalProperties":
            extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
            problems.append(Problem(_json_path(path), f"unknown key(s) {', '.join(extra)}"))
        else:
            problems.append(Problem(_json_path(path), err.message))
    if problems:
        raise SchemaError(problems)

    patterns = []
    seen_ids: dict[int, int] = {}
    for i, obj in enumerate(data):
        pid = obj["ID"]
        if pid in seen_ids:
            problems.append(Problem(f"[{i}].ID", f"duplicate ID {pid} (first used by [{seen_ids[pid]}])"))
        else:
            seen_ids[pid] = i
        types = {}
        for key in ("From", "To"):
            try:
                types[key] = parse_type(obj[key])
            except ValueError as err:
                problems.append(Problem(f"[{i}].{key}", str(err)))
        if len(types) == 2 and types["From"] == types["To"]:
            problems.append(Problem(f"[{i}].To", f"pattern {pid}: To equals From"))
        rules = []
        for j, rule in enumerate(obj["Rules"]):
            parsed = {}
            for key in ("Before", "After"):
                try:
                    parsed[key] = parse_template(rule[key])
                except TemplateError as err:
                    problems.append(Problem(f"[{i}].Rules[{j}].{key}", f"pattern {pid} rule {j}: {err}"))
            if len(parsed) == 2:
                orphans = sorted(parsed["After"].holes - parsed["Before"].holes)
                if orphans:
                    holes = ", ".join(f"${h}$" for h in orphans)
                    problems.append(
                        Problem(f"[{i}].Rules[{j}].After", f"pattern {pid} rule {j}: hole {holes} not bound by Before")
                    )
                else:
                    rules.append(RewriteRule(parsed["Before"], parsed["After"], j))
        if len(types) == 2:
            patterns.append(
                TypeChangePattern(
                    pid, types["From"], types["To"], obj["Priority"],
                    Mode(obj.get("Mode", Mode.CLASSIC.value)), tuple(rules), obj.get("Message"),
                )
            )
    if problems:
        raise SchemaError(problems)
    return Catalog(tuple(patterns))


def dump_catalog(catalog: Catalog) -> str:
    out = []
    for p in catalog.patterns:
        obj = {
            "From": p.from_type.raw or str(p.from_type),
            "To": p.to_type.raw or str(p.to_type),
            "ID": p.id,
            "Priority": p.priority,
            "Mode": p.mode.value,
        }
        if p.message is not None:
            obj["Message"] = p.message
        obj["Rules"] = [{"Before": r.before.raw, "After": r.after.raw} for r in p.rules]
        out.append(obj)
    return json.dumps(out, indent=2) + "\n"


def builtin_catalog() -> Catalog:
    text = resources.files("retype").joinpath("data/typechanges.json").read_text(encoding="utf-8")
    return load_catalog(text)


def message_for(pattern: TypeChangePattern) -> str:
    return pattern.message or DEFAULT_MESSAGE
