from setproof.atp import Invalid as AtpInvalid, Undecided, Valid
from setproof.frontend import formalize_document
from setproof.proof import ProofState, check_records
from setproof.records import Ok


def fold(text) -> ProofState:
    doc = formalize_document(text)
    for o in doc.outcomes:
        assert isinstance(o, Ok), o
    return check_records(doc.records())


def goals(state):
    return [(g.index, g.status) for g in state.goal_check()]


def test_contradiction_skeleton_discharges():
    state = fold(
        "Let A and B be sets. "
        "Let x be an element of A∩B such that x is not an element of A∪B. "
        "We will show that A∩B ⊆ A∪B. "
        "Suppose not. "
        "Thus x∈A∩B and x∉A∪B. "
        "This is a contradiction. "
        "qed")
    assert all(status == "discharged" for _i, status in goals(state))
    assert not state.errors


def test_goal_open_without_proof():
    state = fold("Let A be a set. We will show that A = ∅.")
    assert goals(state) == [(1, "open")]


def test_direct_goal_discharge():
    state = fold("Let A be a set. We will show that A∩A = A. "
                 "It follows that A∩A = A. qed")
    assert goals(state) == [(1, "discharged")]


def test_undeclared_variable_blamed():
    state = fold("Let A be a set. Thus x ∈ A.")
    assert [ (e.code, e.index) for e in state.errors ] == [("UNKNOWN_VAR", 1)]


def test_redeclaration():
    state = fold("Let A be a set. Let A be a set.")
    assert [(e.code, e.index) for e in state.errors] == [("REDECLARED_VAR", 1)]


def test_sort_misuse_is_unknown_var():
    state = fold("Let x be an element. Thus x = x.")
    assert [(e.code, e.index) for e in state.errors] == [("UNKNOWN_VAR", 1)]


def test_qed_without_goal():
    state = fold("Let A be a set. qed")
    assert [(e.code, e.index) for e in state.errors] == [("QED_WITHOUT_GOAL", 1)]


def test_invalid_claim_gets_countermodel():
    state = fold("Let A and B be sets. Thus A ⊆ A∩B.")
    [ob] = state.obligations
    assert isinstance(ob.verdict, AtpInvalid)
    assert ob.origin == 1
    cm = ob.verdict.countermodel
    point = cm.points[0]
    assert cm.membership[(point, "A")] and not cm.membership[(point, "B")]


def test_failed_claim_not_usable_as_fact():
    state = fold("Let A and B be sets. Thus A ⊆ A∩B. Hence A ⊆ B.")
    verdicts = [type(ob.verdict).__name__ for ob in state.obligations]
    assert verdicts == ["Invalid", "Invalid"]


def test_witness_obligation_for_loaded_declaration():
    # choosing an element of A∩B needs the intersection to be inhabited
    state = fold("Let A and B be sets such that A∩B ≠ ∅. "
                 "Choose an element x of A∩B. "
                 "Thus x ∈ A.")
    assert not state.errors
    assert all(isinstance(ob.verdict, Valid) for ob in state.obligations)


def test_witness_obligation_fails_without_support():
    state = fold("Let A and B be sets. Choose an element x of A∩B.")
    [ob] = state.obligations
    assert isinstance(ob.verdict, Undecided)


def test_hypothesis_declarations_carry_no_obligation():
    state = fold("Let A be a non-empty set. Let G, H be sets with non-empty "
                 "intersection. Let P, Q be disjoint sets.")
    assert state.obligations == []


def test_naming_declarations_carry_no_obligation():
    state = fold("Let X and Y be sets and let U be their union. "
                 "Let A, B be sets with intersection K.")
    assert state.obligations == []


def test_assumption_block_does_not_discharge_outer_goal():
    # proving the goal under an extra assumption proves less
    state = fold("Let A and B be sets. We will show that A ⊆ B. "
                 "Suppose that A ⊆ B. Thus A ⊆ B. qed")
    assert goals(state) == [(1, "open")]


def test_assumptions_are_premises():
    state = fold("Let A and B be sets. Suppose that A ⊆ B. Thus A∩B = A.")
    assert all(isinstance(ob.verdict, Valid) for ob in state.obligations)


def test_scope_closing_drops_facts():
    # after qed the subproof's assumption must be gone
    state = fold("Let A and B be sets. We will show that A∩A = A. "
                 "Suppose that A ⊆ B. It follows that A∩A = A. qed "
                 "Hence A ⊆ B.")
    last = state.obligations[-1]
    assert isinstance(last.verdict, AtpInvalid)


def test_case_split_covered_by_disjunction():
    state = fold(
        "Let A and B be sets such that A = ∅ or B = ∅. "
        "We will show that A∩B = ∅. "
        "Case 1: "
        "Suppose that A = ∅. "
        "It follows that A∩B = ∅. "
        "Case 2: "
        "Suppose that B = ∅. "
        "It follows that A∩B = ∅. "
        "qed")
    assert goals(state) == [(1, "discharged")]
    assert not state.errors


def test_case_split_exhaustive_pair():
    state = fold(
        "Let A be a set. "
        "We will show that A∩∅ = ∅. "
        "Case 1: "
        "Suppose that A = ∅. "
        "It follows that A∩∅ = ∅. "
        "Case 2: "
        "Suppose that A ≠ ∅. "
        "It follows that A∩∅ = ∅. "
        "qed")
    assert goals(state) == [(1, "discharged")]
    assert not state.errors


def test_case_split_without_cover_is_flagged():
    state = fold(
        "Let A and B be sets. "
        "We will show that A∩B = ∅. "
        "Case 1: "
        "Suppose that A = ∅. "
        "It follows that A∩B = ∅. "
        "qed")
    assert ("CASE_WITHOUT_DISJUNCTION" in {e.code for e in state.errors})
    assert goals(state) == [(1, "open")]


def test_case_label_without_goal():
    state = fold("Let A be a set. Case 1:")
    assert [(e.code, e.index) for e in state.errors] == [
        ("CASE_WITHOUT_DISJUNCTION", 1)]


def test_implicit_qed_at_eof():
    state = fold("Let A be a set. We will show that A = A. Thus A = A.")
    assert goals(state) == [(1, "discharged")]
    assert not state.errors


def test_open_goal_reported_with_announcement_index():
    state = fold("Let A and B be sets. We will show that A ⊆ B.")
    [g] = state.goal_check()
    assert g.index == 1 and not g.discharged


def test_goal_inside_assumption_block_closes_cleanly():
    # qed must stop at the goal's own scope even when that scope is an
    # assumption block (and never walk past it)
    state = fold("Let A and B be sets. "
                 "Suppose that A ⊆ B. "
                 "We will show that A∩B = A. "
                 "It follows that A∩B = A. "
                 "qed")
    assert goals(state) == [(2, "discharged")]
    assert not state.errors


def test_unclosed_goal_under_stacked_assumptions_terminates():
    state = fold("Let A and B be sets. "
                 "Suppose that A ⊆ B. "
                 "Suppose that B ⊆ A. "
                 "We will show that A = ∅. "
                 "Suppose not. "
                 "We will show that A∪B = B.")
    statuses = dict(goals(state))
    assert statuses[3] == "open"


def test_scope_discipline_on_every_prefix_of_goldens():
    """After any prefix, every fact along the current path only mentions
    identifiers declared on that path."""
    from setproof.formula import free_var_occurrences
    from setproof.goldens import golden_texts

    for golden in golden_texts():
        doc = formalize_document(golden.text)
        state = ProofState()
        for record in doc.records():
            state.apply(record)
            declared = {}
            for scope in state.current.path():
                declared.update(scope.decls)
            for scope in state.current.path():
                for fact, _idx in scope.facts:
                    for name, sort in free_var_occurrences(fact):
                        assert declared.get(name) == sort, (golden.name, fact)
        state.finish()
