"""Two-sorted abstract syntax for Boolean set theory.

Terms come in two sorts: set terms built from variables, the empty set,
union, intersection and complement, and element terms (variables only).
Formulas combine the three atoms (membership, inclusion, equality) with
the propositional connectives, falsum and sorted quantifiers.

All nodes are immutable; structural equality is the only equality
(``A ∩ A`` is not the same formula as ``A``).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Tuple

_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9]*\Z")

# Lowercase atoms with a fixed meaning in the list serialization; they can
# never name a variable, otherwise printing would not be invertible.
RESERVED_ATOMS = frozenset({
    "cup", "cap", "comp", "in", "subseteq", "eq", "not", "and", "or",
    "imp", "iff", "all", "ex", "allel", "exel", "emptyset", "falsum",
})


class SortError(Exception):
    """A quantifier captures an occurrence of its variable at the wrong sort."""


def is_identifier(name: str) -> bool:
    return bool(_IDENT_RE.match(name)) and name not in RESERVED_ATOMS


def _check_identifier(name: str) -> None:
    if not is_identifier(name):
        raise ValueError(f"invalid identifier: {name!r}")


# --- set terms ---------------------------------------------------------------

@dataclass(frozen=True)
class SetTerm:
    pass


@dataclass(frozen=True)
class SetVar(SetTerm):
    name: str

    def __post_init__(self):
        _check_identifier(self.name)


@dataclass(frozen=True)
class EmptySet(SetTerm):
    pass


@dataclass(frozen=True)
class Union(SetTerm):
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class Intersection(SetTerm):
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class Complement(SetTerm):
    inner: SetTerm


# --- element terms ------------------------------------------------------------

@dataclass(frozen=True)
class ElemVar:
    name: str

    def __post_init__(self):
        _check_identifier(self.name)


# --- formulas -----------------------------------------------------------------

@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class Elem(Formula):
    elem: ElemVar
    set: SetTerm


@dataclass(frozen=True)
class Subset(Formula):
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class SetEq(Formula):
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Falsum(Formula):
    pass


@dataclass(frozen=True)
class ForallSet(Formula):
    var: str
    body: Formula

    def __post_init__(self):
        _check_identifier(self.var)


@dataclass(frozen=True)
class ExistsSet(Formula):
    var: str
    body: Formula

    def __post_init__(self):
        _check_identifier(self.var)


@dataclass(frozen=True)
class ForallElem(Formula):
    var: str
    body: Formula

    def __post_init__(self):
        _check_identifier(self.var)


@dataclass(frozen=True)
class ExistsElem(Formula):
    var: str
    body: Formula

    def __post_init__(self):
        _check_identifier(self.var)


QUANTIFIERS = (ForallSet, ExistsSet, ForallElem, ExistsElem)
SET_QUANTIFIERS = (ForallSet, ExistsSet)
ELEM_QUANTIFIERS = (ForallElem, ExistsElem)

# Common leaf shared by everything that speaks about the empty set.
EMPTY = EmptySet()
FALSUM = Falsum()


def non_empty(t: SetTerm) -> Formula:
    """``t ≠ ∅`` — the standard reading of "non-empty"."""
    return Not(SetEq(t, EMPTY))


def subterms(t: SetTerm) -> Iterator[SetTerm]:
    yield t
    if isinstance(t, (Union, Intersection)):
        yield from subterms(t.left)
        yield from subterms(t.right)
    elif isinstance(t, Complement):
        yield from subterms(t.inner)


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.body)
    elif isinstance(f, (And, Or, Implies, Iff)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, QUANTIFIERS):
        yield from subformulas(f.body)


def term_vars(t: SetTerm) -> Iterator[str]:
    """Set variable names in left-to-right occurrence order (with repeats)."""
    if isinstance(t, SetVar):
        yield t.name
    elif isinstance(t, (Union, Intersection)):
        yield from term_vars(t.left)
        yield from term_vars(t.right)
    elif isinstance(t, Complement):
        yield from term_vars(t.inner)


def free_var_occurrences(f: Formula) -> Iterator[Tuple[str, str]]:
    """Free (name, sort) occurrences in order; sort is 'set' or 'element'."""

    def walk(g: Formula, bound_set: frozenset, bound_elem: frozenset):
        if isinstance(g, Elem):
            if g.elem.name not in bound_elem:
                yield (g.elem.name, "element")
            for n in term_vars(g.set):
                if n not in bound_set:
                    yield (n, "set")
        elif isinstance(g, (Subset, SetEq)):
            for n in term_vars(g.left):
                if n not in bound_set:
                    yield (n, "set")
            for n in term_vars(g.right):
                if n not in bound_set:
                    yield (n, "set")
        elif isinstance(g, Not):
            yield from walk(g.body, bound_set, bound_elem)
        elif isinstance(g, (And, Or, Implies, Iff)):
            yield from walk(g.left, bound_set, bound_elem)
            yield from walk(g.right, bound_set, bound_elem)
        elif isinstance(g, SET_QUANTIFIERS):
            yield from walk(g.body, bound_set | {g.var}, bound_elem)
        elif isinstance(g, ELEM_QUANTIFIERS):
            yield from walk(g.body, bound_set, bound_elem | {g.var})
        # Falsum: nothing

    return walk(f, frozenset(), frozenset())


def free_vars(f: Formula) -> Tuple[frozenset, frozenset]:
    """Free variables of ``f`` partitioned by sort: (set names, element names)."""
    sets, elems = set(), set()
    for name, sort in free_var_occurrences(f):
        (sets if sort == "set" else elems).add(name)
    return frozenset(sets), frozenset(elems)


def free_vars_ordered(f: Formula) -> list:
    """Free variable names in first-occurrence order, both sorts mixed."""
    seen = []
    for name, _sort in free_var_occurrences(f):
        if name not in seen:
            seen.append(name)
    return seen


def sort_check(f: Formula) -> None:
    """Raise SortError when a quantifier's name occurs at the other sort in its body.

    Bound variables shadow outer bindings of either sort; a free name may in
    principle occur at both sorts (keeping the namespaces apart per document
    is the proof-structure layer's job).
    """

    def walk(g: Formula, env: dict) -> None:
        if isinstance(g, Elem):
            if env.get(g.elem.name, "element") != "element":
                raise SortError(
                    f"element occurrence of {g.elem.name!r} under a set binder")
            for n in term_vars(g.set):
                if env.get(n, "set") != "set":
                    raise SortError(f"set occurrence of {n!r} under an element binder")
        elif isinstance(g, (Subset, SetEq)):
            for n in (*term_vars(g.left), *term_vars(g.right)):
                if env.get(n, "set") != "set":
                    raise SortError(f"set occurrence of {n!r} under an element binder")
        elif isinstance(g, Not):
            walk(g.body, env)
        elif isinstance(g, (And, Or, Implies, Iff)):
            walk(g.left, env)
            walk(g.right, env)
        elif isinstance(g, SET_QUANTIFIERS):
            walk(g.body, {**env, g.var: "set"})
        elif isinstance(g, ELEM_QUANTIFIERS):
            walk(g.body, {**env, g.var: "element"})

    walk(f, {})


def sort_checks(f: Formula) -> bool:
    try:
        sort_check(f)
    except SortError:
        return False
    return True


def _canon(f: Formula, env_set: dict, env_elem: dict, counter: list) -> object:
    """Structure with bound names replaced by binding depth (de Bruijn style)."""
    if isinstance(f, Elem):
        e = env_elem.get(f.elem.name, f.elem.name)
        return ("elem", e, _canon_term(f.set, env_set))
    if isinstance(f, Subset):
        return ("subset", _canon_term(f.left, env_set), _canon_term(f.right, env_set))
    if isinstance(f, SetEq):
        return ("seteq", _canon_term(f.left, env_set), _canon_term(f.right, env_set))
    if isinstance(f, Not):
        return ("not", _canon(f.body, env_set, env_elem, counter))
    if isinstance(f, (And, Or, Implies, Iff)):
        tag = type(f).__name__.lower()
        return (tag, _canon(f.left, env_set, env_elem, counter),
                _canon(f.right, env_set, env_elem, counter))
    if isinstance(f, Falsum):
        return ("falsum",)
    if isinstance(f, SET_QUANTIFIERS):
        counter[0] += 1
        idx = counter[0]
        tag = "all" if isinstance(f, ForallSet) else "ex"
        return (tag, _canon(f.body, {**env_set, f.var: idx}, env_elem, counter))
    if isinstance(f, ELEM_QUANTIFIERS):
        counter[0] += 1
        idx = counter[0]
        tag = "allel" if isinstance(f, ForallElem) else "exel"
        return (tag, _canon(f.body, env_set, {**env_elem, f.var: idx}, counter))
    raise TypeError(f"not a formula: {f!r}")


def _canon_term(t: SetTerm, env_set: dict) -> object:
    if isinstance(t, SetVar):
        return ("var", env_set.get(t.name, t.name))
    if isinstance(t, EmptySet):
        return ("empty",)
    if isinstance(t, Union):
        return ("cup", _canon_term(t.left, env_set), _canon_term(t.right, env_set))
    if isinstance(t, Intersection):
        return ("cap", _canon_term(t.left, env_set), _canon_term(t.right, env_set))
    if isinstance(t, Complement):
        return ("comp", _canon_term(t.inner, env_set))
    raise TypeError(f"not a set term: {t!r}")


def alpha_eq(f: Formula, g: Formula) -> bool:
    """Equality up to consistent renaming of bound variables.

    Free variables must match by name; there is no commutativity or any
    other logical identification at this level.
    """
    return _canon(f, {}, {}, [0]) == _canon(g, {}, {}, [0])


def subst_set(f: Formula, name: str, replacement: SetTerm) -> Formula:
    """Substitute ``replacement`` for free set-variable ``name`` in ``f``.

    The replacement's variables must not be captured; callers pass either
    closed terms or fresh names, so a binder over any variable of the
    replacement raises instead of silently capturing.
    """
    repl_vars = set(term_vars(replacement))

    def in_term(t: SetTerm) -> SetTerm:
        if isinstance(t, SetVar):
            return replacement if t.name == name else t
        if isinstance(t, Union):
            return Union(in_term(t.left), in_term(t.right))
        if isinstance(t, Intersection):
            return Intersection(in_term(t.left), in_term(t.right))
        if isinstance(t, Complement):
            return Complement(in_term(t.inner))
        return t

    def walk(g: Formula) -> Formula:
        if isinstance(g, Elem):
            return Elem(g.elem, in_term(g.set))
        if isinstance(g, Subset):
            return Subset(in_term(g.left), in_term(g.right))
        if isinstance(g, SetEq):
            return SetEq(in_term(g.left), in_term(g.right))
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, (And, Or, Implies, Iff)):
            return type(g)(walk(g.left), walk(g.right))
        if isinstance(g, SET_QUANTIFIERS):
            if g.var == name:
                return g
            if g.var in repl_vars:
                raise ValueError(f"substitution would capture {g.var!r}")
            return type(g)(g.var, walk(g.body))
        if isinstance(g, ELEM_QUANTIFIERS):
            return type(g)(g.var, walk(g.body))
        return g

    return walk(f)


def subst_elem(f: Formula, name: str, replacement: ElemVar) -> Formula:
    """Substitute an element variable for free element-variable ``name``."""

    def walk(g: Formula) -> Formula:
        if isinstance(g, Elem):
            return Elem(replacement if g.elem.name == name else g.elem, g.set)
        if isinstance(g, (Subset, SetEq, Falsum)):
            return g
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, (And, Or, Implies, Iff)):
            return type(g)(walk(g.left), walk(g.right))
        if isinstance(g, ELEM_QUANTIFIERS):
            if g.var == name:
                return g
            if g.var == replacement.name:
                raise ValueError(f"substitution would capture {g.var!r}")
            return type(g)(g.var, walk(g.body))
        if isinstance(g, SET_QUANTIFIERS):
            return type(g)(g.var, walk(g.body))
        return g

    return walk(f)
