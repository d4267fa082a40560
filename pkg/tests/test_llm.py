import json

import pytest

from setproof.formula import (
    Intersection, Not, SetEq, SetVar, Subset, Union,
)
from setproof.llm import (
    MockTransport, NORMALIZATION_TABLE, PromptConfig,
    UnparseableModelOutput, build_completion_prompt,
    build_request, llm_formalize_document, normalize_tree, parse_model_output,
)
from setproof.records import (
    Assumption, Claim, Declaration, Invalid, MissingContext, Ok,
)

CFG = PromptConfig(mode="completion", example_block="")
A, B = SetVar("A"), SetVar("B")


# --- prompt construction --------------------------------------------------------

def test_prompt_exact_format():
    prompt = build_completion_prompt(
        ["We show that the intersection of A and B is a subset of the union "
         "of A and B."],
        "Suppose not.", CFG)
    assert prompt == ("context:{We show that the intersection of A and B is "
                      "a subset of the union of A and B.} Suppose not. # ")


def test_prompt_empty_context():
    assert build_completion_prompt([], "Let A be a set.", CFG) == \
        "context:{} Let A be a set. # "


def test_prompt_three_sentences_in_document_order():
    prompt = build_completion_prompt(["S one.", "S two.", "S three."], "Now.", CFG)
    assert "context:{S one. S two. S three.} Now. # " == prompt


def test_request_declares_stop_symbol():
    request = build_request([], "Let A be a set.", CFG)
    assert request.stop == ("§",)


def test_prompt_determinism():
    args = (["One.", "Two."], "Three.", CFG)
    assert build_completion_prompt(*args) == build_completion_prompt(*args)


def test_example_block_budget_enforced():
    with pytest.raises(ValueError):
        PromptConfig(example_block="word " * 4000)


def test_stop_symbol_must_not_occur_in_example_sentences():
    with pytest.raises(ValueError):
        PromptConfig(example_block="context:{} A weird § sentence. # x§\n")


# --- output parsing ---------------------------------------------------------------

def test_invalid_and_missing_context_words():
    assert isinstance(parse_model_output("invalid§", CFG), Invalid)
    assert isinstance(parse_model_output(" missing context §garbage", CFG),
                      MissingContext)


def test_internal_triple_roundtrip():
    out = parse_model_output("[[A,B],ang,[not,[[A,cap,B],subseteq,[A,cup,B]]]]§",
                             CFG)
    assert isinstance(out, Ok)
    rec = out.record
    assert isinstance(rec.kind, Assumption)
    assert rec.content == Not(Subset(Intersection(A, B), Union(A, B)))
    assert rec.vars == ("A", "B")


def test_normalization_union_for_cup():
    out = parse_model_output("[[A,B],beh,[[A,union,B],eq,[A,intersection,B]]]§",
                             CFG)
    assert isinstance(out, Ok)
    assert out.record.content == SetEq(Union(A, B), Intersection(A, B))


def test_normalization_idempotent():
    tree = [["A", "union", "B"], "eq", ["comp", "A"]]
    once = normalize_tree(tree)
    assert normalize_tree(once) == once
    sources = {src for src, _t in NORMALIZATION_TABLE}
    targets = {t for _s, t in NORMALIZATION_TABLE}
    assert not sources & targets


def test_assistant_triple_with_loose_math():
    cfg = PromptConfig(mode="assistant", system_prompt="translate")
    out = parse_model_output("[claim, plain, A union B = A cap B]§", cfg)
    assert isinstance(out, Ok)
    assert isinstance(out.record.kind, Claim)
    assert out.record.content == SetEq(Union(A, B), Intersection(A, B))


def test_assistant_declaration_with_assumption():
    cfg = PromptConfig(mode="assistant", system_prompt="translate")
    out = parse_model_output(
        "[variable declaration, with additional assumption, "
        "[[[A, set], [B, set]], A∪B=c(C)]]§", cfg)
    assert isinstance(out, Ok)
    rec = out.record
    assert isinstance(rec.kind, Declaration) and rec.kind.with_assumption
    assert [n for n, _s in rec.content.decls] == ["A", "B"]
    from setproof.formula import Complement
    assert rec.content.assumption == SetEq(Union(A, B), Complement(SetVar("C")))


def test_out_of_domain_content_is_unparseable():
    with pytest.raises(UnparseableModelOutput):
        parse_model_output("[[x],beh,[even,[x]]]§", CFG)


def test_garbage_output_raises_with_raw_preserved():
    with pytest.raises(UnparseableModelOutput) as exc:
        parse_model_output("whatever came back", CFG)
    assert exc.value.raw == "whatever came back"


# --- the minimal-context retry loop over the mock transport ------------------------

GOAL = "We show that A=B."
SUPPOSE = "Suppose not."


def test_retry_sequence_grows_context_one_sentence_at_a_time():
    mapping = {
        build_completion_prompt([], SUPPOSE, CFG): "missing context§",
        build_completion_prompt([GOAL], SUPPOSE, CFG):
            "[[A,B],ang,[not,[A,eq,B]]]§",
        build_completion_prompt([], GOAL, CFG): "[[A,B],ziel,[A,eq,B]]§",
    }
    mock = MockTransport(dict(mapping))
    doc = llm_formalize_document(f"{GOAL} {SUPPOSE}", CFG, mock)
    assert [o.__class__.__name__ for o in doc.outcomes] == ["Ok", "Ok"]
    assert doc.outcomes[1].record.needs_context
    prompts = [entry["prompt"] for entry in mock.log]
    assert prompts == [
        build_completion_prompt([], GOAL, CFG),
        build_completion_prompt([], SUPPOSE, CFG),
        build_completion_prompt([GOAL], SUPPOSE, CFG),
    ]


def test_loop_exhaustion_counts_calls():
    sentences = ["One is one.", "Two is two.", "Three is three."]
    mapping = {}
    for i, s in enumerate(sentences):
        for k in range(0, i + 1):
            mapping[build_completion_prompt(sentences[i - k:i], s, CFG)] = \
                "missing context§" if i == 2 else "[[A],beh,[A,eq,A]]§"
    mock = MockTransport(mapping)
    doc = llm_formalize_document(" ".join(sentences), CFG, mock)
    assert isinstance(doc.outcomes[2], MissingContext)
    third_calls = [e for e in mock.log if "Three" in e["prompt"]]
    assert len(third_calls) == 3  # 1 + index attempts


def test_transport_failure_aborts_with_prior_outcomes():
    mapping = {build_completion_prompt([], GOAL, CFG): "[[A,B],ziel,[A,eq,B]]§"}
    mock = MockTransport(mapping)
    doc = llm_formalize_document(f"{GOAL} {SUPPOSE}", CFG, mock)
    assert doc.transport_error is not None
    assert len(doc.outcomes) == 1
    assert isinstance(doc.outcomes[0], Ok)


def test_mock_records_log_for_assertions(tmp_path):
    mapping = {build_completion_prompt([], GOAL, CFG): "[[A,B],ziel,[A,eq,B]]§"}
    mock = MockTransport(mapping)
    llm_formalize_document(GOAL, CFG, mock)
    out = tmp_path / "log.json"
    mock.save_log(str(out))
    entries = json.loads(out.read_text())
    assert entries == mock.log
    assert entries[0]["response"].endswith("§")


def test_mock_from_file(tmp_path):
    path = tmp_path / "mock.json"
    path.write_text(json.dumps(
        {build_completion_prompt([], GOAL, CFG): "[[A,B],ziel,[A,eq,B]]§"}))
    mock = MockTransport.from_file(str(path))
    doc = llm_formalize_document(GOAL, CFG, mock)
    assert isinstance(doc.outcomes[0], Ok)


def test_backend_equivalence_on_corpus_replay():
    """Replaying the rule backend's records through the mock transport
    yields identical records, so downstream verdicts cannot differ."""
    from setproof.corpus import load_shipped_corpus
    from setproof.context import EMPTY_CONTEXT
    from setproof.grammar import parse_sentence

    entries = load_shipped_corpus()
    mapping = {}
    rule_records = []
    for entry in entries:
        outcome = parse_sentence(entry.sentence, EMPTY_CONTEXT)
        rule_records.append(outcome.record)
        mapping[build_completion_prompt([], entry.sentence, CFG)] = \
            outcome.record.to_string() + "§"
    mock = MockTransport(mapping)
    for entry, rule_rec in zip(entries, rule_records):
        response = mock.send(build_request([], entry.sentence, CFG))
        out = parse_model_output(response, CFG)
        assert isinstance(out, Ok), entry.sentence
        assert out.record.kind == rule_rec.kind
        assert out.record.content == rule_rec.content
        assert out.record.vars == rule_rec.vars
