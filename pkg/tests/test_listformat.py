import pytest
from hypothesis import given, settings

from setproof.formula import (
    And, Elem, ElemVar, EmptySet, ExistsElem, Falsum, ForallElem, Implies,
    Intersection, Not, SetEq, SetVar, Subset, Union, free_vars,
)
from setproof.listformat import (
    MalformedList, formula_from_string, formula_to_string, from_list_format,
    parse_list_string, term_to_list, to_list_format,
)

from strategies import formulas

A, B = SetVar("A"), SetVar("B")
x = ElemVar("x")


def test_prompt_line_formula():
    # [not,[[A,cap,B],subseteq,[A,cup,B]]]
    f = Not(Subset(Intersection(A, B), Union(A, B)))
    assert formula_to_string(f) == "[not,[[A,cap,B],subseteq,[A,cup,B]]]"


def test_membership_atom():
    assert formula_to_string(Elem(x, SetVar("X"))) == "[x,in,X]"


def test_empty_set_leaf():
    assert term_to_list(EmptySet()) == "emptyset"
    assert formula_to_string(SetEq(EmptySet(), A)) == "[emptyset,eq,A]"


def test_falsum():
    assert formula_to_string(Falsum()) == "[falsum]"
    assert formula_from_string("[falsum]") == Falsum()


def test_parse_tolerates_spaces():
    f = formula_from_string("[ [A, cap, B], eq, B ]")
    assert f == SetEq(Intersection(A, B), B)


def test_printing_never_emits_whitespace():
    f = ForallElem("x", Implies(Elem(x, A), Elem(x, Union(A, B))))
    s = formula_to_string(f)
    assert " " not in s
    assert s == "[allel,x,[[x,in,A],imp,[x,in,[A,cup,B]]]]"


def test_bounded_quantifier_desugars():
    f = formula_from_string("[all,[x,in,A],[x,in,B]]")
    assert f == ForallElem("x", Implies(Elem(x, A), Elem(x, B)))
    g = formula_from_string("[ex,[x,in,A],[x,in,B]]")
    assert g == ExistsElem("x", And(Elem(x, A), Elem(x, B)))


def test_malformed_reports_position():
    with pytest.raises(MalformedList) as exc:
        formula_from_string("[A,zap,B]")
    assert "root" in str(exc.value)
    with pytest.raises(MalformedList):
        parse_list_string("[A,,B]")
    with pytest.raises(MalformedList):
        parse_list_string("[A,cap,B")


def test_atom_alone_is_not_a_formula():
    with pytest.raises(MalformedList):
        from_list_format("A")


@settings(max_examples=300)
@given(formulas(max_depth=6))
def test_round_trip_tree(f):
    assert from_list_format(to_list_format(f)) == f


@settings(max_examples=300)
@given(formulas(max_depth=6))
def test_round_trip_string(f):
    s = formula_to_string(f)
    assert formula_to_string(formula_from_string(s)) == s
    assert formula_from_string(s) == f


@given(formulas())
def test_free_vars_stable_under_round_trip(f):
    assert free_vars(from_list_format(to_list_format(f))) == free_vars(f)


def test_printing_deterministic_for_equal_structures():
    one = Not(Subset(Intersection(SetVar("A"), SetVar("B")),
                     Union(SetVar("A"), SetVar("B"))))
    other = Not(Subset(Intersection(SetVar("A"), SetVar("B")),
                       Union(SetVar("A"), SetVar("B"))))
    assert one == other
    assert formula_to_string(one).encode() == formula_to_string(other).encode()
