import random

import pytest
from hypothesis import given, settings

from setproof.atp import (
    FragmentExceeded, Invalid, Obligation, Undecided, Valid,
    brute_force_oracle, decide, decide_qf, decide_quantified,
    _countermodel_satisfies,
)
from setproof.formula import (
    Complement, Elem, ElemVar, EmptySet, ExistsSet, ForallElem,
    ForallSet, Implies, Intersection, Not, SetEq, SetVar, Subset, Union,
)

from strategies import qf_formulas, random_qf_obligation

A, B, C, X = SetVar("A"), SetVar("B"), SetVar("C"), SetVar("X")
x = ElemVar("x")
EMPTY = EmptySet()


def test_intersection_subset_of_union():
    ob = Obligation([], Subset(Intersection(A, B), Union(A, B)))
    assert isinstance(decide_qf(ob), Valid)


def test_invalid_with_one_point_countermodel():
    ob = Obligation([], Subset(A, Intersection(A, B)))
    verdict = decide_qf(ob)
    assert isinstance(verdict, Invalid)
    cm = verdict.countermodel
    assert len(cm.points) == 1
    p = cm.points[0]
    assert cm.membership[(p, "A")] and not cm.membership[(p, "B")]


def test_membership_chain():
    ob = Obligation([Elem(x, A), Subset(A, B)], Elem(x, B))
    assert isinstance(decide_qf(ob), Valid)
    assert isinstance(brute_force_oracle(ob, max_universe=2), Valid)


def test_decide_qf_rejects_quantifiers():
    with pytest.raises(FragmentExceeded):
        decide_qf(Obligation([], ForallSet("X", Subset(X, X))))


def test_empty_set_disjoint_from_every_set():
    ob = Obligation([], ForallSet("X", SetEq(Intersection(EMPTY, X), EMPTY)))
    assert isinstance(decide_quantified(ob), Valid)


def test_existential_with_empty_witness():
    ob = Obligation([], ExistsSet("A", SetEq(Intersection(A, B), Intersection(A, C))))
    verdict = decide_quantified(ob)
    assert isinstance(verdict, Valid)
    assert dict(verdict.witnesses)["A"] == EMPTY


def test_self_membership_existential_undecided():
    ob = Obligation([], ExistsSet("A", Elem(ElemVar("A"), A)))
    verdict = decide_quantified(ob)
    assert verdict == Undecided("no witness found")


def test_de_morgan_via_oracle():
    good = Obligation([], SetEq(Complement(Union(A, B)),
                                Intersection(Complement(A), Complement(B))))
    assert isinstance(brute_force_oracle(good, 3), Valid)
    bad = Obligation([], SetEq(Complement(Intersection(A, B)),
                               Intersection(Complement(A), Complement(B))))
    verdict = brute_force_oracle(bad, 3)
    assert isinstance(verdict, Invalid)
    assert len(verdict.countermodel.points) == 1


def test_universal_elem_conclusion():
    ob = Obligation([Subset(A, B)],
                    ForallElem("x", Implies(Elem(x, A), Elem(x, B))))
    assert isinstance(decide_quantified(ob), Valid)


def test_universal_elem_premise_is_usable():
    # an established universal fact supports its instances
    fact = ForallElem("x", Implies(Elem(x, A), Elem(x, B)))
    ob = Obligation([fact, Elem(x, A)], Elem(x, B))
    assert isinstance(decide(ob), Valid)


def test_ex_falso_existential():
    contradiction = Not(Subset(Intersection(A, B), Union(A, B)))
    ob = Obligation([contradiction],
                    ExistsSet("D", SetEq(D := SetVar("D"), D)))
    assert isinstance(decide(ob), Valid)


def test_inconsistent_premises_validate_falsum():
    from setproof.formula import Falsum
    ob = Obligation([Not(Subset(Intersection(A, B), Union(A, B)))], Falsum())
    assert isinstance(decide(ob), Valid)


def test_countermodel_honesty_simple():
    ob = Obligation([Subset(A, B)], Subset(B, A))
    verdict = decide(ob)
    assert isinstance(verdict, Invalid)
    cm = verdict.countermodel
    assert _countermodel_satisfies(cm, ob.premises)
    assert not _countermodel_satisfies(cm, [ob.conclusion])


@settings(max_examples=300, deadline=None)
@given(qf_formulas(max_depth=2), qf_formulas(max_depth=2))
def test_oracle_agreement_property(premise, conclusion):
    from setproof.atp import count_inclusion_atoms
    from setproof.formula import free_vars
    ob = Obligation([premise], conclusion)
    k = count_inclusion_atoms([premise, conclusion])
    elems = set(free_vars(premise)[1]) | set(free_vars(conclusion)[1])
    if k + len(elems) > 3:
        return  # outside the oracle's 3-point reach
    ours = decide_qf(ob)
    oracle = brute_force_oracle(ob, max_universe=3)
    assert type(ours) is type(oracle)


def test_seeded_agreement_sample():
    rng = random.Random(20240817)
    for _ in range(250):
        ob = random_qf_obligation(rng)
        ours = decide_qf(ob)
        oracle = brute_force_oracle(ob, max_universe=3)
        assert type(ours) is type(oracle), (ob.premises, ob.conclusion)
        if isinstance(ours, Invalid):
            cm = ours.countermodel
            assert _countermodel_satisfies(cm, ob.premises)
            assert not _countermodel_satisfies(cm, [ob.conclusion])


def test_monotonicity_adding_premises():
    rng = random.Random(99)
    for _ in range(120):
        ob = random_qf_obligation(rng)
        base = decide_qf(ob)
        if not isinstance(base, Valid):
            continue
        extra = random_qf_obligation(rng).conclusion
        stronger = Obligation([*ob.premises, extra], ob.conclusion)
        assert isinstance(decide_qf(stronger), Valid)


def test_quantified_valid_recheck_against_oracle():
    from setproof.formula import subst_set
    cases = [
        Obligation([], ForallSet("X", SetEq(Intersection(EMPTY, X), EMPTY))),
        Obligation([], ExistsSet("A", SetEq(Intersection(A, B), Intersection(A, C)))),
        Obligation([], ForallElem("x", Implies(Elem(x, A), Elem(x, Union(A, B))))),
    ]
    for ob in cases:
        verdict = decide_quantified(ob)
        assert isinstance(verdict, Valid)
        conclusion = ob.conclusion
        for name, term in verdict.witnesses:
            assert isinstance(conclusion, ExistsSet)
            conclusion = subst_set(conclusion.body, name, term)
        assert isinstance(brute_force_oracle(Obligation(ob.premises, conclusion), 3),
                          Valid)
