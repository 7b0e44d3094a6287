"""Recursive-descent parser for the supported Java subset.

Statements the grammar does not cover (try, switch, throw, ...) are kept as
``Opaque`` nodes: the exact token range is preserved and the plain
identifiers inside it are exposed as ``NameRef`` leaves so reference search
can still see them.
"""

from __future__ import annotations

import itertools
from dataclasses import replace
from typing import Iterator

from .lexer import LexError, Token, tokenize
from .nodes import Node, set_parents
from .typeref import PRIMITIVES, TypeRef, resolve_name


class ParseError(Exception):
    def __init__(self, message: str, offset: int, expected=()):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset
        self.expected = frozenset(expected)


MODIFIERS = frozenset(
    "public protected private static final abstract synchronized native "
    "transient volatile strictfp default".split()
)
ASSIGN_OPS = frozenset("= += -= *= /= %= &= |= ^= <<=".split())
BINARY_PREC = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4,
    "&": 5,
    "==": 6,
    "!=": 6,
    "<": 7,
    ">": 7,
    "<=": 7,
    ">=": 7,
    "instanceof": 7,
    "<<": 8,
    ">>": 8,
    ">>>": 8,
    "+": 9,
    "-": 9,
    "*": 10,
    "/": 10,
    "%": 10,
}
PREFIX_OPS = frozenset("+ - ! ~ ++ --".split())
_BLOCK_STATEMENT_STARTS = frozenset(
    "try synchronized switch if while for do { class interface enum".split()
)
_CONTINUATIONS = frozenset({"catch", "finally", "else"})
_OPENERS = {"(": ")", "[": "]", "{": "}"}
_CLOSERS = frozenset(_OPENERS.values())


class Parser:
    def __init__(
        self,
        source: str,
        *,
        template: bool = False,
        ids: Iterator[int] | None = None,
        known: dict[str, str] | None = None,
    ):
        self.source = source
        self.toks: list[Token] = tokenize(source, template=template)
        self.i = 0
        self.ids = ids if ids is not None else itertools.count()
        self.known = dict(known or {})

    # -- token helpers ------------------------------------------------------
    def peek(self, k: int = 0) -> Token | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def at(self, text: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok is not None and tok.text == text and tok.kind != "literal"

    def at_ident(self, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok is not None and tok.kind == "identifier"

    def here(self) -> int:
        tok = self.peek()
        return tok.start if tok else len(self.source)

    @property
    def last_end(self) -> int:
        return self.toks[self.i - 1].end if self.i else 0

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.source))
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}", {text})
        return self.advance()

    def expect_ident(self) -> Token:
        if not self.at_ident():
            raise self.error("expected identifier", {"identifier"})
        return self.advance()

    def error(self, message: str, expected=()) -> ParseError:
        tok = self.peek()
        if tok is not None:
            message = f"{message}, found {tok.text!r}"
        return ParseError(message, self.here(), expected)

    def node(self, kind: str, start: int, children=(), **kw) -> Node:
        end = kw.pop("end", None)
        return Node(kind, start, self.last_end if end is None else end, list(children), id=next(self.ids), **kw)

    def skip_balanced(self) -> None:
        """Skip from an opening bracket to its partner (inclusive)."""
        depth = 0
        while True:
            tok = self.advance()
            if tok.text in _OPENERS and tok.kind == "punctuation":
                depth += 1
            elif tok.text in _CLOSERS and tok.kind == "punctuation":
                depth -= 1
                if depth == 0:
                    return

    def skip_angle(self) -> None:
        depth = 0
        while True:
            tok = self.advance()
            if tok.text == "<":
                depth += 1
            elif tok.text == ">":
                depth -= 1
                if depth == 0:
                    return

    # -- compilation unit ---------------------------------------------------
    def compilation_unit(self) -> Node:
        children = []
        package = ""
        self.skip_annotations()
        if self.at("package"):
            start = self.advance().start
            package = self.qualified_name()
            self.expect(";")
            children.append(self.node("Package", start, text=package))
        imports = []
        while self.at("import"):
            start = self.advance().start
            mods = ("static",) if self.at("static") else ()
            if mods:
                self.advance()
            name = self.qualified_name()
            if self.at("."):
                self.advance()
                self.expect("*")
                name += ".*"
            self.expect(";")
            imp = self.node("Import", start, text=name, mods=mods)
            children.append(imp)
            imports.append(imp)

        for j, tok in enumerate(self.toks[:-1]):
            if tok.text in ("class", "interface", "enum") and self.toks[j + 1].kind == "identifier":
                simple = self.toks[j + 1].text
                self.known.setdefault(simple, f"{package}.{simple}" if package else simple)
        for imp in imports:
            if "static" not in imp.mods and not imp.text.endswith(".*"):
                self.known[imp.text.rsplit(".", 1)[-1]] = imp.text

        while self.peek() is not None:
            if self.at(";"):
                self.advance()
                continue
            children.append(self.type_declaration())
        return Node("CompilationUnit", 0, len(self.source), children, text=package, id=next(self.ids))

    def qualified_name(self) -> str:
        parts = [self.expect_ident().text]
        while self.at(".") and self.at_ident(1):
            self.advance()
            parts.append(self.advance().text)
        return ".".join(parts)

    def skip_annotations(self) -> None:
        while self.at("@") and not self.at("interface", 1):
            self.advance()
            self.qualified_name()
            if self.at("("):
                self.skip_balanced()

    def modifiers(self) -> tuple[str, ...]:
        mods = []
        while True:
            if self.at("@") and not self.at("interface", 1):
                self.skip_annotations()
            elif self.peek() is not None and self.peek().text in MODIFIERS and self.peek().kind == "keyword":
                mods.append(self.advance().text)
            else:
                return tuple(mods)

    def type_declaration(self) -> Node:
        start = self.here()
        mods = self.modifiers()
        if self.at("class") or self.at("interface"):
            return self.class_declaration(start, mods)
        if self.at("enum") or self.at("@") or (self.at_ident() and self.peek().text == "record"):
            return self.opaque_declaration(start)
        raise self.error("expected type declaration", {"class", "interface"})

    def opaque_declaration(self, start: int) -> Node:
        while not self.at("{"):
            self.advance()
        self.skip_balanced()
        return self.node("Opaque", start)

    def class_declaration(self, start: int, mods: tuple[str, ...]) -> Node:
        if self.advance().text == "interface":
            mods = mods + ("interface",)
        name = self.expect_ident().text
        if self.at("<"):
            self.skip_angle()
        for kw in ("extends", "implements"):
            if self.at(kw):
                self.advance()
                self.parse_type()
                while self.at(","):
                    self.advance()
                    self.parse_type()
        self.expect("{")
        members: list[Node] = []
        while not self.at("}"):
            if self.peek() is None:
                raise self.error("unterminated class body", {"}"})
            members.extend(self.member(name))
        self.expect("}")
        return self.node("ClassDecl", start, members, text=name, mods=mods)

    def member(self, class_name: str) -> list[Node]:
        start = self.here()
        if self.at(";"):
            self.advance()
            return []
        mods = self.modifiers()
        if self.at("{"):
            body = self.block()
            return [self.node("Initializer", start, [body], mods=mods)]
        if self.at("class") or self.at("interface") or self.at("enum") or self.at("@"):
            return [self.opaque_declaration(start)]
        if self.at("<"):
            self.skip_angle()
        if self.at_ident() and self.peek().text == class_name and self.at("(", 1):
            name = self.advance().text
            params = self.parameters()
            self.throws_clause()
            body = self.block()
            return [self.node("MethodDecl", start, [*params, body], text=name, mods=mods + ("ctor",))]
        tnode = self.type_node()
        name = self.expect_ident().text
        if self.at("("):
            params = self.parameters()
            while self.at("[") and self.at("]", 1):
                self.advance()
                self.advance()
            self.throws_clause()
            children = [tnode, *params]
            if self.at("{"):
                children.append(self.block())
            else:
                self.expect(";")
            return [self.node("MethodDecl", start, children, text=name, mods=mods)]
        self.i -= 1  # hand the name back to the declarator loop
        decls = self.declarators(tnode, start, "FieldDecl", mods)
        self.expect(";")
        return decls

    def throws_clause(self) -> None:
        if self.at("throws"):
            self.advance()
            self.parse_type()
            while self.at(","):
                self.advance()
                self.parse_type()

    def parameters(self) -> list[Node]:
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                params.append(self.parameter())
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        return params

    def parameter(self) -> Node:
        start = self.here()
        mods = self.modifiers()
        tnode = self.type_node()
        if self.at("..."):
            self.advance()
            mods = mods + ("...",)
            tnode.type = replace(tnode.type, dims=tnode.type.dims + 1)
        name = self.expect_ident().text
        self.extra_dims(tnode)
        return self.node("Param", start, [tnode], text=name, mods=mods)

    def extra_dims(self, tnode: Node) -> None:
        while self.at("[") and self.at("]", 1):
            self.advance()
            self.advance()
            tnode.type = replace(tnode.type, dims=tnode.type.dims + 1)

    def declarators(self, tnode: Node, start: int, kind: str, mods: tuple[str, ...]) -> list[Node]:
        decls = []
        while True:
            name = self.expect_ident().text
            t = tnode if not decls else Node("TypeRef", tnode.start, tnode.end, text=tnode.text, type=tnode.type, id=next(self.ids))
            self.extra_dims(t)
            children = [t]
            if self.at("="):
                self.advance()
                children.append(self.array_init() if self.at("{") else self.expression())
            decls.append(self.node(kind, start, children, text=name, mods=mods))
            if not self.at(","):
                return decls
            self.advance()

    # -- types --------------------------------------------------------------
    def type_node(self) -> Node:
        start = self.here()
        t = self.parse_type()
        return self.node("TypeRef", start, text=self.source[start : self.last_end], type=t)

    def parse_type(self) -> TypeRef:
        start = self.here()
        tok = self.peek()
        if tok is None:
            raise self.error("expected type", {"type"})
        if tok.text == "?":
            self.advance()
            if self.at("extends") or self.at("super"):
                kw = self.advance().text
                bound = self.parse_type()
                return TypeRef(f"? {kw}", (bound,), raw=self.source[start : self.last_end])
            return TypeRef("?", raw="?")
        if tok.text in PRIMITIVES and tok.kind in ("keyword", "identifier"):
            self.advance()
            fqn, args = tok.text, ()
        elif tok.kind == "identifier":
            parts = [self.advance().text]
            args = ()
            while True:
                if self.at("<"):
                    args = self.type_arguments()
                if self.at(".") and self.at_ident(1):
                    self.advance()
                    parts.append(self.advance().text)
                    continue
                break
            fqn = resolve_name(".".join(parts), self.known)
        else:
            raise self.error("expected type", {"type"})
        dims = 0
        while self.at("[") and self.at("]", 1):
            self.advance()
            self.advance()
            dims += 1
        return TypeRef(fqn, args, dims, raw=self.source[start : self.last_end])

    def type_arguments(self) -> tuple[TypeRef, ...]:
        self.expect("<")
        if self.at(">"):
            self.advance()
            return ()
        args = [self.parse_type()]
        while self.at(","):
            self.advance()
            args.append(self.parse_type())
        self.expect(">")
        return tuple(args)

    # -- statements ---------------------------------------------------------
    def block(self) -> Node:
        start = self.expect("{").start
        stmts: list[Node] = []
        while not self.at("}"):
            if self.peek() is None:
                raise self.error("unterminated block", {"}"})
            stmts.extend(self.statement_or_opaque())
        self.expect("}")
        return self.node("Block", start, stmts)

    def statement_or_opaque(self) -> list[Node]:
        save = self.i
        try:
            return self.statement()
        except ParseError as err:
            self.i = save
            return [self.opaque_statement(err)]

    def sub_statement(self) -> Node:
        stmts = self.statement_or_opaque()
        if len(stmts) != 1:
            raise ParseError("declaration not allowed here", stmts[0].start)
        return stmts[0]

    def opaque_statement(self, err: ParseError) -> Node:
        first = self.peek()
        if first is None or (first.text in _CLOSERS and first.kind == "punctuation"):
            raise err
        start_index = self.i
        block_like = first.text in _BLOCK_STATEMENT_STARTS or (first.kind == "identifier" and self.at(":", 1))
        depth = 0
        while True:
            if self.peek() is None:
                raise err
            tok = self.advance()
            if tok.kind != "punctuation":
                continue
            if tok.text in _OPENERS:
                depth += 1
            elif tok.text in _CLOSERS:
                depth -= 1
                if depth < 0:
                    raise err
                if depth == 0 and tok.text == "}" and block_like:
                    nxt = self.peek()
                    if nxt is not None and (nxt.text in _CONTINUATIONS or (nxt.text == "while" and first.text == "do")):
                        continue
                    break
            elif tok.text == ";" and depth == 0:
                break
        refs = []
        toks = self.toks
        for j in range(start_index, self.i):
            tok = toks[j]
            if tok.kind != "identifier" or (j + 1 < len(toks) and toks[j + 1].text == "("):
                continue
            mods: tuple[str, ...] = ()
            if j > start_index and toks[j - 1].text in (".", "::"):
                if toks[j - 1].text == "." and j - 1 > start_index and toks[j - 2].text == "this":
                    mods = ("this",)
                else:
                    continue
            refs.append(Node("NameRef", tok.start, tok.end, text=tok.text, mods=mods, id=next(self.ids)))
        return self.node("Opaque", first.start, refs)

    def statement(self) -> list[Node]:
        start = self.here()
        if self.at("{"):
            return [self.block()]
        if self.at(";"):
            self.advance()
            return [self.node("Empty", start)]
        if self.at("if"):
            self.advance()
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            parts = [cond, self.sub_statement()]
            if self.at("else"):
                self.advance()
                parts.append(self.sub_statement())
            return [self.node("If", start, parts)]
        if self.at("while"):
            self.advance()
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            return [self.node("While", start, [cond, self.sub_statement()])]
        if self.at("for"):
            return [self.for_statement()]
        if self.at("return"):
            self.advance()
            parts = [] if self.at(";") else [self.expression()]
            self.expect(";")
            return [self.node("Return", start, parts)]
        if self.local_decl_ahead():
            decls = self.local_var_decl()
            self.expect(";")
            return decls
        expr = self.expression()
        self.expect(";")
        return [self.node("ExprStmt", start, [expr])]

    def local_decl_ahead(self) -> bool:
        save = self.i
        try:
            self.modifiers()
            tok = self.peek()
            if tok is None or tok.kind not in ("identifier", "keyword") or tok.text in ("new", "this", "super"):
                return False
            self.parse_type()
            return self.at_ident() and self.peek(1) is not None and self.peek(1).text in ("=", ";", ",", "[", ":")
        except ParseError:
            return False
        finally:
            self.i = save

    def local_var_decl(self) -> list[Node]:
        start = self.here()
        mods = self.modifiers()
        tnode = self.type_node()
        return self.declarators(tnode, start, "LocalVarDecl", mods)

    def for_statement(self) -> Node:
        start = self.advance().start
        self.expect("(")
        if self.local_decl_ahead():
            save = self.i
            dstart = self.here()
            mods = self.modifiers()
            tnode = self.type_node()
            name = self.expect_ident().text
            if self.at(":"):
                decl = self.node("LocalVarDecl", dstart, [tnode], text=name, mods=mods)
                self.advance()
                iterable = self.expression()
                self.expect(")")
                return self.node("ForEach", start, [decl, iterable, self.sub_statement()])
            self.i = save
            parts = self.local_var_decl()
        else:
            parts = self.expression_list(";")
        self.expect(";")
        if not self.at(";"):
            parts.append(self.expression())
        self.expect(";")
        parts.extend(self.expression_list(")"))
        self.expect(")")
        parts.append(self.sub_statement())
        return self.node("For", start, parts)

    def expression_list(self, terminator: str) -> list[Node]:
        exprs = []
        if self.at(terminator):
            return exprs
        while True:
            exprs.append(self.expression())
            if not self.at(","):
                return exprs
            self.advance()

    # -- expressions --------------------------------------------------------
    def expression(self) -> Node:
        if self.lambda_ahead():
            return self.lambda_expression()
        lhs = self.conditional()
        op, n = self.assign_op()
        if op is None:
            return lhs
        self.i += n
        rhs = self.expression()
        return self.node("Assignment", lhs.start, [lhs, rhs], text=op)

    def greater_run(self) -> tuple[int, Token | None]:
        """Count adjacent '>' tokens; also return the token that follows."""
        n = 0
        end = None
        while self.at(">", n) and (end is None or self.peek(n).start == end):
            end = self.peek(n).end
            n += 1
        nxt = self.peek(n)
        if nxt is not None and nxt.start != end:
            nxt = None
        return n, nxt

    def assign_op(self) -> tuple[str | None, int]:
        tok = self.peek()
        if tok is None or tok.kind != "operator":
            return None, 0
        if tok.text in ASSIGN_OPS:
            return tok.text, 1
        if tok.text == ">":
            n, nxt = self.greater_run()
            if nxt is not None and nxt.text == ">=" and n in (1, 2):
                return ">" * n + ">=", n + 1
        return None, 0

    def binary_op(self) -> tuple[str | None, int]:
        tok = self.peek()
        if tok is None:
            return None, 0
        if tok.text == "instanceof" and tok.kind == "keyword":
            return "instanceof", 1
        if tok.kind != "operator":
            return None, 0
        if tok.text == ">":
            n, nxt = self.greater_run()
            if n > 3 or (nxt is not None and nxt.text == ">="):
                return None, 0
            return ">" * n, n
        if tok.text in BINARY_PREC:
            return tok.text, 1
        return None, 0

    def lambda_ahead(self) -> bool:
        if self.at_ident() and self.at("->", 1):
            return True
        if not self.at("("):
            return False
        depth = 0
        j = self.i
        while j < len(self.toks):
            t = self.toks[j]
            if t.text == "(" and t.kind == "punctuation":
                depth += 1
            elif t.text == ")" and t.kind == "punctuation":
                depth -= 1
                if depth == 0:
                    return j + 1 < len(self.toks) and self.toks[j + 1].text == "->"
            j += 1
        return False

    def lambda_expression(self) -> Node:
        start = self.here()
        params = []
        mods: tuple[str, ...] = ()
        if self.at_ident():
            tok = self.advance()
            params.append(self.node("Param", tok.start, text=tok.text))
        else:
            mods = ("paren",)
            self.expect("(")
            if not self.at(")"):
                while True:
                    if self.at_ident() and self.peek(1) is not None and self.peek(1).text in (",", ")"):
                        tok = self.advance()
                        params.append(self.node("Param", tok.start, text=tok.text))
                    else:
                        params.append(self.parameter())
                    if not self.at(","):
                        break
                    self.advance()
            self.expect(")")
        self.expect("->")
        body = self.block() if self.at("{") else self.expression()
        return self.node("Lambda", start, [*params, body], mods=mods)

    def conditional(self) -> Node:
        cond = self.binary(1)
        if not self.at("?"):
            return cond
        self.advance()
        then = self.expression()
        self.expect(":")
        other = self.lambda_expression() if self.lambda_ahead() else self.conditional()
        return self.node("Conditional", cond.start, [cond, then, other])

    def binary(self, min_prec: int) -> Node:
        left = self.unary()
        while True:
            op, n = self.binary_op()
            if op is None or BINARY_PREC[op] < min_prec:
                return left
            self.i += n
            if op == "instanceof":
                tnode = self.type_node()
                left = self.node("InstanceOf", left.start, [left, tnode])
                continue
            right = self.binary(BINARY_PREC[op] + 1)
            left = self.node("Binary", left.start, [left, right], text=op)

    def unary(self) -> Node:
        tok = self.peek()
        if tok is not None and tok.kind == "operator" and tok.text in PREFIX_OPS:
            self.advance()
            operand = self.unary()
            return self.node("Unary", tok.start, [operand], text=tok.text)
        if self.at("(") and self.cast_ahead():
            start = self.advance().start
            tnode = self.type_node()
            self.expect(")")
            return self.node("Cast", start, [tnode, self.unary()])
        return self.postfix()

    def cast_ahead(self) -> bool:
        save = self.i
        try:
            self.advance()
            t = self.parse_type()
            if not self.at(")"):
                return False
            self.advance()
            if t.fqn in PRIMITIVES:
                return True
            nxt = self.peek()
            return nxt is not None and (
                nxt.kind in ("identifier", "literal", "hole") or nxt.text in ("(", "this", "new", "!", "~", "super")
            )
        except ParseError:
            return False
        finally:
            self.i = save

    def postfix(self) -> Node:
        expr = self.primary()
        while True:
            if self.at("."):
                self.advance()
                tok = self.peek()
                if tok is None or not (tok.kind == "identifier" or tok.text == "class"):
                    raise self.error("unsupported member selection", {"identifier"})
                self.advance()
                if self.at("("):
                    args = self.arguments()
                    expr = self.node("MethodCall", expr.start, [expr, *args], text=tok.text, mods=("recv",))
                else:
                    expr = self.node("FieldAccess", expr.start, [expr], text=tok.text)
            elif self.at("["):
                self.advance()
                index = self.expression()
                self.expect("]")
                expr = self.node("ArrayAccess", expr.start, [expr, index])
            elif self.at("::"):
                self.advance()
                tok = self.peek()
                if tok is None or not (tok.kind == "identifier" or tok.text == "new"):
                    raise self.error("expected method reference name", {"identifier"})
                self.advance()
                expr = self.node("MethodRef", expr.start, [expr], text=tok.text)
            elif self.at("++") or self.at("--"):
                op = self.advance().text
                expr = self.node("Postfix", expr.start, [expr], text=op)
            else:
                return expr

    def arguments(self) -> list[Node]:
        self.expect("(")
        args = self.expression_list(")")
        self.expect(")")
        return args

    def primary(self) -> Node:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.source), {"expression"})
        start = tok.start
        if tok.kind == "literal":
            self.advance()
            return self.node("Literal", start, text=tok.text)
        if tok.kind == "hole":
            self.advance()
            return self.node("Hole", start, text=tok.text.strip("$"))
        if tok.text in ("this", "super") and tok.kind == "keyword":
            self.advance()
            if self.at("("):
                args = self.arguments()
                return self.node("MethodCall", start, args, text=tok.text)
            return self.node("This" if tok.text == "this" else "Super", start, text=tok.text)
        if tok.text == "(":
            self.advance()
            inner = self.expression()
            self.expect(")")
            return self.node("Paren", start, [inner])
        if tok.text == "new" and tok.kind == "keyword":
            return self.creator()
        if tok.kind == "identifier":
            self.advance()
            if self.at("("):
                args = self.arguments()
                return self.node("MethodCall", start, args, text=tok.text)
            return self.node("NameRef", start, text=tok.text)
        raise self.error("unexpected token", {"expression"})

    def creator(self) -> Node:
        start = self.advance().start
        tnode = self.type_node()
        if self.at("("):
            args = self.arguments()
            if self.at("{"):
                raise self.error("anonymous classes are not supported")
            return self.node("New", start, [tnode, *args])
        parts = [tnode]
        while self.at("["):
            self.advance()
            if self.at("]"):
                self.advance()
                continue
            parts.append(self.expression())
            self.expect("]")
        if self.at("{"):
            parts.append(self.array_init())
        if len(parts) == 1 and tnode.type.dims == 0:
            raise self.error("expected '('", {"("})
        return self.node("NewArray", start, parts)

    def array_init(self) -> Node:
        start = self.expect("{").start
        elems = []
        while not self.at("}"):
            elems.append(self.array_init() if self.at("{") else self.expression())
            if not self.at(","):
                break
            self.advance()
        self.expect("}")
        return self.node("ArrayInit", start, elems)


def parse_compilation_unit(source: str, *, ids: Iterator[int] | None = None) -> Node:
    """Parse a whole ``.java`` file. Raises LexError or ParseError."""
    cu = Parser(source, ids=ids).compilation_unit()
    set_parents(cu)
    return cu


def parse_expression(source: str, *, template: bool = False, ids: Iterator[int] | None = None) -> Node:
    """Parse ``source`` as exactly one expression."""
    p = Parser(source, template=template, ids=ids)
    if p.peek() is None:
        raise ParseError("empty expression", 0, {"expression"})
    expr = p.expression()
    if p.peek() is not None:
        raise p.error("trailing input after expression", {"<end>"})
    set_parents(expr)
    return expr


__all__ = ["LexError", "ParseError", "Parser", "parse_compilation_unit", "parse_expression"]
