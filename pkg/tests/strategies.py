"""Shared hypothesis strategies and a plain-random obligation generator."""
from __future__ import annotations

import random

from hypothesis import strategies as st

from setproof.formula import (
    And, Complement, Elem, ElemVar, EmptySet, ExistsElem, ExistsSet, Falsum,
    ForallElem, ForallSet, Iff, Implies, Intersection, Not, Or, SetEq, SetVar,
    Subset, Union,
)

SET_NAMES = ["A", "B", "C"]
ELEM_NAMES = ["x", "y"]


def set_terms(names=SET_NAMES, max_depth=3):
    leaves = st.one_of(
        st.sampled_from(names).map(SetVar),
        st.just(EmptySet()),
    )

    def extend(children):
        return st.one_of(
            st.tuples(children, children).map(lambda p: Union(*p)),
            st.tuples(children, children).map(lambda p: Intersection(*p)),
            children.map(Complement),
        )

    return st.recursive(leaves, extend, max_leaves=max_depth + 1)


def qf_formulas(set_names=SET_NAMES, elem_names=ELEM_NAMES, max_depth=3):
    terms = set_terms(set_names, max_depth=2)
    atoms = st.one_of(
        st.tuples(st.sampled_from(elem_names).map(ElemVar), terms).map(lambda p: Elem(*p)),
        st.tuples(terms, terms).map(lambda p: Subset(*p)),
        st.tuples(terms, terms).map(lambda p: SetEq(*p)),
        st.just(Falsum()),
    )

    def extend(children):
        return st.one_of(
            children.map(Not),
            st.tuples(children, children).map(lambda p: And(*p)),
            st.tuples(children, children).map(lambda p: Or(*p)),
            st.tuples(children, children).map(lambda p: Implies(*p)),
            st.tuples(children, children).map(lambda p: Iff(*p)),
        )

    return st.recursive(atoms, extend, max_leaves=max_depth + 2)


def formulas(max_depth=3):
    """Sort-correct formulas including quantifiers, for round-trip tests."""
    base = qf_formulas(max_depth=max_depth)

    def extend(children):
        return st.one_of(
            children.map(Not),
            st.tuples(children, children).map(lambda p: And(*p)),
            st.tuples(children, children).map(lambda p: Or(*p)),
            st.tuples(children, children).map(lambda p: Implies(*p)),
            st.tuples(st.sampled_from(["Q", "R"]), children).map(lambda p: ForallSet(*p)),
            st.tuples(st.sampled_from(["Q", "R"]), children).map(lambda p: ExistsSet(*p)),
            st.tuples(st.sampled_from(["u", "v"]), children).map(lambda p: ForallElem(*p)),
            st.tuples(st.sampled_from(["u", "v"]), children).map(lambda p: ExistsElem(*p)),
        )

    return st.recursive(base, extend, max_leaves=max_depth + 3)


# --- seeded plain-random generation (for the big agreement run) ---------------------

def _random_term(rng: random.Random, names, depth):
    if depth == 0 or rng.random() < 0.4:
        return SetVar(rng.choice(names)) if rng.random() < 0.8 else EmptySet()
    op = rng.randrange(3)
    if op == 0:
        return Union(_random_term(rng, names, depth - 1), _random_term(rng, names, depth - 1))
    if op == 1:
        return Intersection(_random_term(rng, names, depth - 1), _random_term(rng, names, depth - 1))
    return Complement(_random_term(rng, names, depth - 1))


def _random_qf(rng: random.Random, set_names, elem_names, depth):
    if depth == 0 or rng.random() < 0.45:
        kind = rng.randrange(3 if elem_names else 2)
        if elem_names and kind == 2:
            return Elem(ElemVar(rng.choice(elem_names)), _random_term(rng, set_names, 2))
        ctor = Subset if kind == 0 else SetEq
        return ctor(_random_term(rng, set_names, 2), _random_term(rng, set_names, 2))
    op = rng.randrange(5)
    if op == 0:
        return Not(_random_qf(rng, set_names, elem_names, depth - 1))
    ctor = (And, Or, Implies, Iff)[op - 1]
    return ctor(_random_qf(rng, set_names, elem_names, depth - 1),
                _random_qf(rng, set_names, elem_names, depth - 1))


def random_qf_obligation(rng: random.Random, max_witness_points: int = 3):
    """One random QF obligation within the brute-force oracle's reach.

    The oracle enumerates universes up to ``max_witness_points`` points, so
    the generator only emits obligations whose countermodels are guaranteed
    to fit: one potential witness per inclusion/equality atom plus one point
    per element variable.
    """
    from setproof.atp import Obligation, count_inclusion_atoms
    from setproof.formula import free_vars

    while True:
        n_sets = rng.choice([1, 2, 2, 3])
        n_elems = rng.choice([0, 0, 1, 1, 2])
        set_names = SET_NAMES[:n_sets]
        elem_names = ELEM_NAMES[:n_elems]
        n_premises = rng.choice([0, 1, 1, 2])
        premises = [_random_qf(rng, set_names, elem_names, rng.randint(1, 3))
                    for _ in range(n_premises)]
        conclusion = _random_qf(rng, set_names, elem_names, rng.randint(1, 3))
        k = count_inclusion_atoms([*premises, conclusion])
        elems = set()
        for f in (*premises, conclusion):
            elems |= set(free_vars(f)[1])
        if k + len(elems) <= max_witness_points:
            return Obligation(premises, conclusion)
