"""Totality checks: whatever the input, the pipeline answers with a
report — errors are values, never crashes."""
import random

from setproof.corpus import load_shipped_corpus
from setproof.formula import SetEq, SetVar
from setproof.goldens import golden_texts
from setproof.grammar import parse_sentence
from setproof.context import EMPTY_CONTEXT
from setproof.pipeline import check_text
from setproof.records import Assumption, Claim, Declaration, GoalAnnouncement, Ok


def test_shuffled_corpus_documents_never_crash():
    sentences = [e.sentence for e in load_shipped_corpus()]
    for golden in golden_texts():
        sentences.extend(golden.text.split("\n"))
    rng = random.Random(11)
    for _ in range(120):
        sample = rng.sample(sentences, rng.randint(3, 20))
        report = check_text(" ".join(s for s in sample if s))
        assert report.verdict in ("Accepted", "AcceptedWithWarnings", "Rejected")


def test_duplicated_golden_text_redeclares_not_crashes():
    text = golden_texts()[0].text
    report = check_text(text + "\n" + text)
    assert report.verdict == "Rejected"
    assert any(i.code == "REDECLARED_VAR" for i in report.items)


CUE_EXEMPLARS = [
    ("Suppose that A=B.", Assumption),
    ("Assume that A=B.", Assumption),
    ("Let us assume that A=B.", Assumption),
    ("Let us take it as given that A=B.", Assumption),
    ("To see this, first suppose that A=B.", Assumption),
    ("It follows that A=B.", Claim),
    ("Thus A=B.", Claim),
    ("Hence A=B.", Claim),
    ("Therefore A=B.", Claim),
    ("Consequently, A=B.", Claim),
    ("From this, we get that A=B.", Claim),
    ("By reductio, A=B.", Claim),
    ("We will show that A=B.", GoalAnnouncement),
    ("We will now show that A=B.", GoalAnnouncement),
    ("We need to show that A=B.", GoalAnnouncement),
    ("We need to demonstrate that A=B.", GoalAnnouncement),
    ("Our goal is to see that A=B.", GoalAnnouncement),
    ("It remains to establish that A=B.", GoalAnnouncement),
    ("As we will presently show, A=B.", GoalAnnouncement),
    ("Let D be a set.", Declaration),
    ("Pick D to be a set.", Declaration),
    ("Choose a set D.", Declaration),
    ("Consider sets D, E satisfying D=E.", Declaration),
]


def test_every_documented_cue_parses():
    for raw, kind in CUE_EXEMPLARS:
        outcome = parse_sentence(raw, EMPTY_CONTEXT)
        assert isinstance(outcome, Ok), (raw, outcome)
        assert isinstance(outcome.record.kind, kind), raw


def test_every_element_variant():
    outcome = parse_sentence("Every element of A is an element of B.",
                             EMPTY_CONTEXT)
    assert isinstance(outcome, Ok)
    from setproof.formula import Elem, ElemVar, ForallElem, Implies
    assert outcome.record.content == ForallElem(
        "x", Implies(Elem(ElemVar("x"), SetVar("A")),
                     Elem(ElemVar("x"), SetVar("B"))))


def test_equal_sign_chain_is_rejected_not_crashing():
    outcome = parse_sentence("Suppose that A=B=C.", EMPTY_CONTEXT)
    from setproof.records import Invalid
    assert isinstance(outcome, Invalid)
