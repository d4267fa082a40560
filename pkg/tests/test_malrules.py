import pytest

from setproof.atp import Invalid, Obligation, decide
from setproof.formula import (
    Elem, ElemVar, EmptySet, Implies, Intersection, Not, SetEq, SetVar,
    Subset, Union,
)
from setproof.malrules import (
    SelfCheckFailure, canonical_instance, diagnose,
    load_library, mal_rule_selfcheck, parse_library, parse_pattern, unify,
)

A, B = SetVar("A"), SetVar("B")
x = ElemVar("x")
LIB = load_library()


def failed(premises, conclusion) -> Obligation:
    ob = Obligation(premises, conclusion)
    ob.verdict = decide(ob)
    assert not type(ob.verdict).__name__ == "Valid"
    return ob


def ids(diagnoses):
    return {d.rule_id for d in diagnoses}


def test_required_rules_present():
    have = {r.rule_id for r in LIB}
    assert {"DENY_ANTECEDENT", "AFFIRM_CONSEQUENT", "CONVERSE_SUBSET",
            "UNION_AS_INTERSECTION", "COMPLEMENT_DISTRIB",
            "SUBSET_FROM_MEMBER"} <= have


def test_deny_antecedent_fires_on_set_atoms():
    e = lambda t: SetEq(t, EmptySet())  # noqa: E731
    ob = failed([Not(e(A)), Implies(e(A), e(B))], Not(e(B)))
    assert "DENY_ANTECEDENT" in ids(diagnose(ob, LIB))


def test_affirm_consequent():
    ob = failed([Subset(A, B), Implies(SetEq(A, B), Subset(A, B))], SetEq(A, B))
    assert "AFFIRM_CONSEQUENT" in ids(diagnose(ob, LIB))


def test_converse_subset():
    ob = failed([Subset(A, B), Elem(x, B)], Elem(x, A))
    assert "CONVERSE_SUBSET" in ids(diagnose(ob, LIB))


def test_union_as_intersection():
    ob = failed([Elem(x, Union(A, B))], Elem(x, A))
    assert "UNION_AS_INTERSECTION" in ids(diagnose(ob, LIB))


def test_subset_from_member():
    ob = failed([Elem(x, A), Elem(x, B)], Subset(A, B))
    assert "SUBSET_FROM_MEMBER" in ids(diagnose(ob, LIB))


def test_complement_distrib_both_shapes():
    from setproof.formula import Complement
    cap = failed([], SetEq(Complement(Intersection(A, B)),
                           Intersection(Complement(A), Complement(B))))
    assert "COMPLEMENT_DISTRIB" in ids(diagnose(cap, LIB))
    cup = failed([], SetEq(Complement(Union(A, B)),
                           Union(Complement(A), Complement(B))))
    assert "COMPLEMENT_DISTRIB" in ids(diagnose(cup, LIB))


def test_substitution_soundness():
    """Applying the reported substitution to the rule patterns reproduces
    parts that are actually present in the obligation."""
    from setproof.listformat import to_list_format

    ob = failed([Elem(x, Union(A, B))], Elem(x, A))
    [d] = [d for d in diagnose(ob, LIB) if d.rule_id == "UNION_AS_INTERSECTION"]
    rule = next(r for r in LIB if r.rule_id == "UNION_AS_INTERSECTION")

    def instantiate(p):
        if isinstance(p, str):
            return d.substitution.get(p, p)
        return [instantiate(q) for q in p]

    assert instantiate(rule.conclusion) == to_list_format(ob.conclusion)
    premise_trees = [to_list_format(p) for p in ob.premises]
    for pat in rule.premises:
        assert instantiate(pat) in premise_trees


def test_selfcheck_passes_on_shipped_library():
    report = mal_rule_selfcheck(LIB)
    assert len(report) == len(LIB)
    assert all(isinstance(v, Invalid) for _r, v in report)


def test_selfcheck_rejects_bogus_rule():
    bogus = parse_library(
        "rule TRIVIALLY_FINE\npremise ?a\nconclusion ?a\nmessage nope.")
    with pytest.raises(SelfCheckFailure) as exc:
        mal_rule_selfcheck(LIB + bogus)
    assert "TRIVIALLY_FINE" in str(exc.value)


def test_canonical_instance_uses_fresh_distinct_names():
    rule = next(r for r in LIB if r.rule_id == "SUBSET_FROM_MEMBER")
    ob = canonical_instance(rule)
    names = set()
    for f in (*ob.premises, ob.conclusion):
        from setproof.formula import free_vars
        s, e = free_vars(f)
        names |= set(s) | set(e)
    assert len(names) >= 3  # two sets and one element, all distinct


def test_unify_consistency():
    pat = parse_pattern("[?x,in,[?a,cup,?a]]")
    assert unify(pat, ["x", "in", ["A", "cup", "A"]], {}) is not None
    assert unify(pat, ["x", "in", ["A", "cup", "B"]], {}) is None


def test_no_firing_on_valid_shapes():
    # diagnose is only ever called on failed obligations; the pipeline
    # guard is tested here by checking a valid obligation's diagnoses are
    # meaningless to it (the library may match shapes, the pipeline won't
    # ask). Golden-text zero-firing lives in test_pipeline.
    ob = Obligation([Elem(x, A)], Elem(x, A))
    ob.verdict = decide(ob)
    assert type(ob.verdict).__name__ == "Valid"


def test_message_rendering_fills_metavariables():
    ob = failed([Elem(x, Union(A, B))], Elem(x, A))
    [d] = [d for d in diagnose(ob, LIB) if d.rule_id == "UNION_AS_INTERSECTION"]
    assert "x" in d.message and "A" in d.message and "B" in d.message
