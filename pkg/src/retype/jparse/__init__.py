"""Lexer, parser and span-preserving AST for a Java subset."""

from .edits import BoundsError, Edit, EditError, OverlapError, apply_edits
from .lexer import LexError, Token, line_col, offset_of, render, tokenize
from .nodes import Node, contains, enclosing
from .parser import ParseError, parse_compilation_unit, parse_expression
from .typeref import BUILTIN_TYPES, TypeRef, instantiate, match_type, resolve_name

SourceError = (LexError, ParseError)

__all__ = [
    "BUILTIN_TYPES",
    "BoundsError",
    "Edit",
    "EditError",
    "LexError",
    "Node",
    "OverlapError",
    "ParseError",
    "SourceError",
    "Token",
    "TypeRef",
    "apply_edits",
    "contains",
    "enclosing",
    "instantiate",
    "line_col",
    "match_type",
    "offset_of",
    "parse_compilation_unit",
    "parse_expression",
    "render",
    "resolve_name",
    "tokenize",
]
