import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from retype.jparse import (
    BoundsError,
    Edit,
    LexError,
    OverlapError,
    ParseError,
    TypeRef,
    apply_edits,
    instantiate,
    line_col,
    match_type,
    offset_of,
    parse_compilation_unit,
    parse_expression,
    render,
    resolve_name,
    tokenize,
)
from retype.jparse.edits import check_disjoint

SAMPLE = """package demo;

import java.io.File;
import java.util.*;

public class A {
    private File f = new File("x"); // trailing
    int a = 1, b[] = {2};

    /* block */ boolean m(String s, int... rest) {
        for (int i = 0; i < rest.length; i++) { a += rest[i]; }
        for (String t : java.util.List.of(s)) { f = null; }
        try { f.delete(); } catch (Exception e) { }
        Runnable r = () -> f.exists();
        return s == null ? false : (a >> 2) > 0;
    }
}
"""


def kinds(node):
    return [n.kind for n in node.walk()]


# -- lexer ---------------------------------------------------------------------

def test_render_is_lossless_on_sample():
    assert render(SAMPLE, tokenize(SAMPLE)) == SAMPLE


def test_tokens_skip_comments_and_whitespace():
    toks = tokenize("a /*x*/ + // y\n b")
    assert [t.text for t in toks] == ["a", "+", "b"]
    assert toks[1].span == (8, 9)


def test_generic_closers_lex_as_single_angles():
    toks = tokenize("List<List<String>> x")
    assert [t.text for t in toks].count(">") == 2


@pytest.mark.parametrize(
    "text,offset",
    [('a "abc', 2), ("x /* never closed", 2), ("'a", 0)],
)
def test_lex_errors_carry_offset(text, offset):
    with pytest.raises(LexError) as info:
        tokenize(text)
    assert info.value.offset == offset


def test_template_holes_only_in_template_mode():
    assert [t.kind for t in tokenize("$1$.x()", template=True)][0] == "hole"
    with pytest.raises(LexError):
        tokenize("$1.x()", template=True)


@given(st.text(alphabet="ab\n\r\tc", max_size=40))
def test_line_col_and_offset_are_inverse(text):
    for off in range(len(text) + 1):
        if off > 0 and text[off - 1] == "\r" and off < len(text) and text[off] == "\n":
            continue
        line, col = line_col(text, off)
        assert offset_of(text, line, col) == off


def test_line_col_is_one_based():
    assert line_col("ab\ncd", 3) == (2, 1)
    assert line_col("ab\ncd", 0) == (1, 1)


_atoms = st.sampled_from(["a", "b1", "42", "3.5", '"s t"', "'c'", "+", "(", ")", ".", "x_y", "<", ">", "==", "&&"])
_gaps = st.sampled_from(["", " ", "  ", "\n", "\t", " /* c */ ", " // c\n"])


@settings(max_examples=200)
@given(st.lists(st.tuples(_atoms, _gaps), max_size=20))
def test_random_token_streams_render_back(parts):
    text = "".join(a + (g or " ") for a, g in parts)
    assert render(text, tokenize(text)) == text


# -- parser --------------------------------------------------------------------

def test_sample_parses_with_expected_shape():
    unit = parse_compilation_unit(SAMPLE)
    assert unit.text == "demo"
    imports = [c for c in unit.children if c.kind == "Import"]
    assert [i.text for i in imports] == ["java.io.File", "java.util.*"]
    cls = unit.child("ClassDecl")
    assert cls.text == "A"
    fields = [c for c in cls.children if c.kind == "FieldDecl"]
    assert [f.text for f in fields] == ["f", "a", "b"]
    assert fields[2].typeref().type.dims == 1
    method = cls.child("MethodDecl")
    assert [p.text for p in method.params] == ["s", "rest"]
    assert method.params[1].typeref().type.dims == 1
    assert "Opaque" in kinds(method)
    assert "Lambda" in kinds(method)


def test_spans_slice_the_source():
    unit = parse_compilation_unit(SAMPLE)
    for n in unit.walk():
        if n.kind == "FieldDecl" and n.text == "f":
            assert SAMPLE[n.typeref().start : n.typeref().end] == "File"
            assert SAMPLE[n.initializer.start : n.initializer.end] == 'new File("x")'


def test_node_ids_are_unique_and_parents_consistent():
    unit = parse_compilation_unit(SAMPLE)
    nodes = list(unit.walk())
    assert len({n.id for n in nodes}) == len(nodes)
    for n in nodes:
        for c in n.children:
            assert c.parent is n
            assert n.start <= c.start and c.end <= n.end


def test_opaque_statement_keeps_name_leaves():
    unit = parse_compilation_unit("class A { File f; void m() { try { f.delete(); } finally { } } }")
    opaque = next(n for n in unit.walk() if n.kind == "Opaque")
    assert [c.text for c in opaque.children] == ["f"]


@pytest.mark.parametrize(
    "source,offset",
    [("class A { int }", 14), ("class A { void m( { } }", 18), ("class { }", 6)],
)
def test_parse_errors_report_offset(source, offset):
    with pytest.raises(ParseError) as info:
        parse_compilation_unit(source)
    assert info.value.offset == offset
    assert info.value.expected


@pytest.mark.parametrize(
    "text,kind,op",
    [
        ("a + b * c", "Binary", "+"),
        ("a = b = c", "Assignment", "="),
        ("a ? b : c ? d : e", "Conditional", None),
        ("x >>= 2", "Assignment", ">>="),
        ("(String) o", "Cast", None),
        ("a >> 2", "Binary", ">>"),
        ("o instanceof String", "InstanceOf", None),
        ("String::valueOf", "MethodRef", None),
        ("x -> x + 1", "Lambda", None),
        ("new int[3]", "NewArray", None),
    ],
)
def test_expression_roots(text, kind, op):
    node = parse_expression(text)
    assert node.kind == kind
    if op is not None:
        assert node.text == op


def test_binary_is_left_associative():
    node = parse_expression("a - b - c")
    assert node.children[0].kind == "Binary"
    assert node.children[1].text == "c"


def test_method_call_receiver_and_args():
    call = parse_expression("f.resolve(name, 2)")
    assert call.kind == "MethodCall" and call.text == "resolve"
    assert call.receiver.text == "f"
    assert [a.text for a in call.args] == ["name", "2"]


# -- types -----------------------------------------------------------------------

def test_builtin_and_explicit_resolution():
    assert resolve_name("Path", {}) == "java.nio.file.Path"
    assert resolve_name("Path", {"Path": "com.acme.Path"}) == "com.acme.Path"
    assert resolve_name("Unknown", {}) == "Unknown"


def test_match_type_binds_variables_consistently():
    t = TypeRef("T")
    string = TypeRef("java.lang.String")
    pattern = TypeRef("java.util.Map", (t, t))
    assert match_type(pattern, TypeRef("java.util.Map", (string, string))) == {"T": string}
    assert match_type(pattern, TypeRef("java.util.Map", (string, TypeRef("java.lang.Integer")))) is None


def test_raw_pattern_accepts_any_parameterization():
    assert match_type(TypeRef("java.util.List"), TypeRef("java.util.List", (TypeRef("java.lang.String"),))) == {}


def test_instantiate_substitutes_bound_variables():
    string = TypeRef("java.lang.String")
    pattern = TypeRef("java.util.function.Predicate", (TypeRef("T"),))
    assert instantiate(pattern, {"T": string}) == TypeRef("java.util.function.Predicate", (string,))


# -- edits -----------------------------------------------------------------------

def test_apply_edits_right_to_left():
    assert apply_edits("abcdef", [Edit("f", 0, 1, "X"), Edit("f", 3, 5, "")]) == "Xbcf"


def test_overlap_is_rejected_with_pair():
    a, b = Edit("f", 0, 3, "x"), Edit("f", 2, 4, "y")
    with pytest.raises(OverlapError) as info:
        apply_edits("abcdef", [a, b])
    assert set(info.value.pair) == {a, b}


def test_two_insertions_at_one_offset_conflict():
    with pytest.raises(OverlapError):
        check_disjoint([Edit("f", 2, 2, "x"), Edit("f", 2, 2, "y")])


def test_adjacent_edits_are_fine():
    assert apply_edits("abcd", [Edit("f", 0, 2, "X"), Edit("f", 2, 2, "-"), Edit("f", 2, 4, "Y")]) == "X-Y"


def test_out_of_bounds_edit():
    with pytest.raises(BoundsError):
        apply_edits("abc", [Edit("f", 2, 9, "")])
