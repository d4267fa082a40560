"""The internal list format and its concrete syntax.

A value of the format is a rose tree: either an atom (a lowercase keyword
or an identifier) or a list of subtrees. Formulas print to trees with a
list at the root; set terms may print to bare atoms.

Concrete syntax, bit-exact::

    list := '[' item (',' item)* ']'
    item := atom | list
    atom := [A-Za-z][A-Za-z0-9]*

Printing emits no whitespace; the parser additionally tolerates ASCII
spaces between tokens and accepts the empty list ``[]`` (needed for the
content slot of annotation records, which plain formulas never produce).

Keyword shapes: binary operators and binary atoms are infix 3-lists
(``[A,cap,B]``, ``[x,in,X]``); negation, complement and quantifiers are
prefix (``[not,F]``, ``[comp,A]``, ``[all,X,F]``). A quantifier whose
variable slot is a membership 3-list, as in ``[all,[x,in,A],F]``, is
accepted and desugared to the unbounded form with an implication (for
``all``) or a conjunction (for ``ex``); this bounded shape is an input
convenience only and is never printed.
"""
from __future__ import annotations

from typing import List, Union as TUnion

from .formula import (
    And, Complement, Elem, ElemVar, EmptySet, ExistsElem, ExistsSet, Falsum,
    ForallElem, ForallSet, Formula, Iff, Implies, Intersection, Not, Or,
    SetEq, SetTerm, SetVar, Subset, Union, is_identifier,
)

ListFormat = TUnion[str, List["ListFormat"]]


class MalformedList(Exception):
    """Input does not denote a formula; ``where`` locates the offending atom."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{message} at {where}" if where else message)
        self.where = where


_BINARY_TERM = {"cup": Union, "cap": Intersection}
_BINARY_ATOM = {"subseteq": Subset, "eq": SetEq}
_CONNECTIVE = {"and": And, "or": Or, "imp": Implies, "iff": Iff}
_QUANTIFIER = {"all": ForallSet, "ex": ExistsSet,
               "allel": ForallElem, "exel": ExistsElem}


# --- printing -----------------------------------------------------------------

def term_to_list(t: SetTerm) -> ListFormat:
    if isinstance(t, SetVar):
        return t.name
    if isinstance(t, EmptySet):
        return "emptyset"
    if isinstance(t, Union):
        return [term_to_list(t.left), "cup", term_to_list(t.right)]
    if isinstance(t, Intersection):
        return [term_to_list(t.left), "cap", term_to_list(t.right)]
    if isinstance(t, Complement):
        return ["comp", term_to_list(t.inner)]
    raise TypeError(f"not a set term: {t!r}")


def to_list_format(f: Formula) -> ListFormat:
    if isinstance(f, Elem):
        return [f.elem.name, "in", term_to_list(f.set)]
    if isinstance(f, Subset):
        return [term_to_list(f.left), "subseteq", term_to_list(f.right)]
    if isinstance(f, SetEq):
        return [term_to_list(f.left), "eq", term_to_list(f.right)]
    if isinstance(f, Not):
        return ["not", to_list_format(f.body)]
    if isinstance(f, And):
        return [to_list_format(f.left), "and", to_list_format(f.right)]
    if isinstance(f, Or):
        return [to_list_format(f.left), "or", to_list_format(f.right)]
    if isinstance(f, Implies):
        return [to_list_format(f.left), "imp", to_list_format(f.right)]
    if isinstance(f, Iff):
        return [to_list_format(f.left), "iff", to_list_format(f.right)]
    if isinstance(f, Falsum):
        return ["falsum"]
    if isinstance(f, ForallSet):
        return ["all", f.var, to_list_format(f.body)]
    if isinstance(f, ExistsSet):
        return ["ex", f.var, to_list_format(f.body)]
    if isinstance(f, ForallElem):
        return ["allel", f.var, to_list_format(f.body)]
    if isinstance(f, ExistsElem):
        return ["exel", f.var, to_list_format(f.body)]
    raise TypeError(f"not a formula: {f!r}")


def print_list(l: ListFormat) -> str:
    if isinstance(l, str):
        return l
    return "[" + ",".join(print_list(x) for x in l) + "]"


def formula_to_string(f: Formula) -> str:
    return print_list(to_list_format(f))


# --- string parsing -----------------------------------------------------------

def parse_list_string(s: str) -> ListFormat:
    pos = 0

    def skip_spaces():
        nonlocal pos
        while pos < len(s) and s[pos] == " ":
            pos += 1

    def parse_item() -> ListFormat:
        nonlocal pos
        skip_spaces()
        if pos >= len(s):
            raise MalformedList("unexpected end of input", f"offset {pos}")
        if s[pos] == "[":
            return parse_bracket()
        start = pos
        while pos < len(s) and s[pos].isalnum():
            pos += 1
        atom = s[start:pos]
        if not atom or not atom[0].isalpha() or not atom.isalnum():
            raise MalformedList(f"expected atom, found {s[pos:pos + 1]!r}",
                                f"offset {start}")
        return atom

    def parse_bracket() -> ListFormat:
        nonlocal pos
        pos += 1  # '['
        items: List[ListFormat] = []
        skip_spaces()
        if pos < len(s) and s[pos] == "]":
            pos += 1
            return items
        while True:
            items.append(parse_item())
            skip_spaces()
            if pos >= len(s):
                raise MalformedList("missing ']'", f"offset {pos}")
            if s[pos] == ",":
                pos += 1
                continue
            if s[pos] == "]":
                pos += 1
                return items
            raise MalformedList(f"expected ',' or ']', found {s[pos]!r}",
                                f"offset {pos}")

    result = parse_item()
    skip_spaces()
    if pos != len(s):
        raise MalformedList(f"trailing input {s[pos:]!r}", f"offset {pos}")
    return result


# --- reading back into formulas -------------------------------------------------

def _var_atom(l: ListFormat, path: str) -> str:
    if not isinstance(l, str) or not is_identifier(l):
        raise MalformedList(f"expected a variable, found {print_list(l)!r}", path)
    return l


def term_from_list(l: ListFormat, path: str = "term") -> SetTerm:
    if isinstance(l, str):
        if l == "emptyset":
            return EmptySet()
        if is_identifier(l):
            return SetVar(l)
        raise MalformedList(f"unknown term atom {l!r}", path)
    if len(l) == 2 and l[0] == "comp":
        return Complement(term_from_list(l[1], path + "[1]"))
    if len(l) == 3 and isinstance(l[1], str) and l[1] in _BINARY_TERM:
        ctor = _BINARY_TERM[l[1]]
        return ctor(term_from_list(l[0], path + "[0]"),
                    term_from_list(l[2], path + "[2]"))
    raise MalformedList(f"not a set term: {print_list(l)!r}", path)


def from_list_format(l: ListFormat, path: str = "root") -> Formula:
    if isinstance(l, str):
        raise MalformedList(f"formula must be a list, found atom {l!r}", path)
    if len(l) == 1 and l[0] == "falsum":
        return Falsum()
    if len(l) == 2 and l[0] == "not":
        return Not(from_list_format(l[1], path + "[1]"))
    if len(l) == 3 and isinstance(l[0], str) and l[0] in _QUANTIFIER:
        return _quantified(l, path)
    if len(l) == 3 and isinstance(l[1], str):
        kw = l[1]
        if kw == "in":
            return Elem(ElemVar(_var_atom(l[0], path + "[0]")),
                        term_from_list(l[2], path + "[2]"))
        if kw in _BINARY_ATOM:
            return _BINARY_ATOM[kw](term_from_list(l[0], path + "[0]"),
                                    term_from_list(l[2], path + "[2]"))
        if kw in _CONNECTIVE:
            return _CONNECTIVE[kw](from_list_format(l[0], path + "[0]"),
                                   from_list_format(l[2], path + "[2]"))
    raise MalformedList(f"not a formula: {print_list(l)!r}", path)


def _quantified(l: ListFormat, path: str) -> Formula:
    kw, var_slot, body_slot = l
    body = from_list_format(body_slot, path + "[2]")
    if isinstance(var_slot, str):
        return _QUANTIFIER[kw](_var_atom(var_slot, path + "[1]"), body)
    # Bounded form [q,[x,in,T],F]: desugared, element-sorted binder.
    if (len(var_slot) == 3 and var_slot[1] == "in"):
        v = _var_atom(var_slot[0], path + "[1][0]")
        bound = Elem(ElemVar(v), term_from_list(var_slot[2], path + "[1][2]"))
        if kw in ("all", "allel"):
            return ForallElem(v, Implies(bound, body))
        return ExistsElem(v, And(bound, body))
    raise MalformedList(f"bad quantifier variable {print_list(var_slot)!r}",
                        path + "[1]")


def formula_from_string(s: str) -> Formula:
    return from_list_format(parse_list_string(s))
