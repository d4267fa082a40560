import json

import pytest

from setproof.cli import default_prompt_config, main
from setproof.goldens import golden_texts, mutations
from setproof.llm import build_completion_prompt


@pytest.fixture()
def golden_file(tmp_path):
    path = tmp_path / "proof.txt"
    path.write_text(golden_texts()[0].text, encoding="utf-8")
    return str(path)


def test_check_accepted_exit_zero(golden_file, capsys):
    assert main(["check", golden_file]) == 0
    out = capsys.readouterr().out
    assert "verdict: Accepted" in out


def test_check_rejected_exit_two_and_blame(tmp_path, capsys):
    mut = mutations()[1]
    path = tmp_path / "mut.txt"
    path.write_text(mut.text, encoding="utf-8")
    assert main(["check", str(path)]) == 2
    out = capsys.readouterr().out
    assert f"s{mut.blamed_index + 1} " in out


def test_check_missing_file_exit_three(capsys):
    assert main(["check", "/nonexistent/file.txt"]) == 3
    assert "error" in capsys.readouterr().err


def test_check_json_shape(golden_file, capsys):
    from setproof.segment import segment
    assert main(["check", golden_file, "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["verdict"] == "Accepted"
    segs, _ = segment(golden_texts()[0].text)
    assert len(payload["sentences"]) == len(segs)


def test_corpus_shipped_scores_perfect(capsys):
    assert main(["corpus"]) == 0
    out = capsys.readouterr().out
    assert "score: 50/50 (100 percent)" in out


def test_corpus_empty_file(tmp_path, capsys):
    path = tmp_path / "empty.txt"
    path.write_text("")
    assert main(["corpus", str(path)]) == 0
    assert "score: 0/0" in capsys.readouterr().out


def test_corpus_malformed_block_reported(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("Only a sentence.\nbeh\n")  # missing formalization line
    assert main(["corpus", str(path)]) == 3
    assert "error" in capsys.readouterr().err


def test_corpus_with_llm_mock_one_wrong_entry(tmp_path, capsys):
    """Replaying recorded rule-backend outputs through the mock transport
    gives 50/50; corrupting one canned answer gives 49/50."""
    from setproof.context import EMPTY_CONTEXT
    from setproof.corpus import load_shipped_corpus
    from setproof.grammar import parse_sentence

    cfg = default_prompt_config()
    entries = load_shipped_corpus()
    mapping = {}
    for entry in entries:
        outcome = parse_sentence(entry.sentence, EMPTY_CONTEXT)
        mapping[build_completion_prompt([], entry.sentence, cfg)] = \
            outcome.record.to_string() + "§"
    mock_path = tmp_path / "mock.json"
    mock_path.write_text(json.dumps(mapping), encoding="utf-8")
    assert main(["corpus", f"--backend=llm-mock={mock_path}"]) == 0
    assert "score: 50/50" in capsys.readouterr().out

    key = build_completion_prompt([], entries[9].sentence, cfg)
    mapping[key] = "[[A,B],ang,[A,subseteq,B]]§"  # wrong formalization
    mock_path.write_text(json.dumps(mapping), encoding="utf-8")
    assert main(["corpus", f"--backend=llm-mock={mock_path}"]) == 2
    assert "score: 49/50" in capsys.readouterr().out


def test_check_with_llm_mock_backend(tmp_path, capsys):
    cfg = default_prompt_config()
    text = "We show that A=B. Suppose not."
    mapping = {
        build_completion_prompt([], "We show that A=B.", cfg):
            "[[A,B],ziel,[A,eq,B]]§",
        build_completion_prompt([], "Suppose not.", cfg): "missing context§",
        build_completion_prompt(["We show that A=B."], "Suppose not.", cfg):
            "[[A,B],ang,[not,[A,eq,B]]]§",
    }
    mock_path = tmp_path / "mock.json"
    mock_path.write_text(json.dumps(mapping), encoding="utf-8")
    doc_path = tmp_path / "doc.txt"
    doc_path.write_text(text, encoding="utf-8")
    code = main(["check", str(doc_path), f"--backend=llm-mock={mock_path}",
                 "--json"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 2  # open goal: nothing was proved
    assert payload["sentences"][1]["kind"] == "ang"


def test_llm_backend_requires_env(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("DIPROCHE_LLM_URL", raising=False)
    monkeypatch.delenv("DIPROCHE_LLM_TOKEN", raising=False)
    doc = tmp_path / "doc.txt"
    doc.write_text("Let A be a set.", encoding="utf-8")
    assert main(["check", str(doc), "--backend=llm"]) == 3
    assert "DIPROCHE_LLM_URL" in capsys.readouterr().err
