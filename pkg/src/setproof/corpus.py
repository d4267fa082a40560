"""Golden corpus loading and scoring.

Corpus files are UTF-8 text, blocks separated by blank lines: sentence,
expected ``kind`` or ``kind/subtype``, expected list-format formalization,
and an optional ``note:`` line for documented corrections. Lines starting
with ``#`` are comments.
"""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import List, Optional, Tuple

from .context import EMPTY_CONTEXT
from .formula import sort_check
from .grammar import parse_sentence
from .listformat import (
    MalformedList, formula_from_string, from_list_format, parse_list_string,
    print_list,
)
from .records import Ok, kind_string


class CorpusFormatError(Exception):
    pass


_KIND_STRINGS = {"decl/plain", "decl/assmpt", "ang", "beh", "ziel", "note"}


@dataclass(frozen=True)
class CorpusEntry:
    sentence: str
    kind: str           # kind or kind/subtype string
    formalization: str  # canonical list-format text
    note: Optional[str] = None
    line: int = 0


def _validate_formalization(entry: CorpusEntry) -> None:
    tree = parse_list_string(entry.formalization)
    if entry.kind.startswith("decl"):
        if entry.kind == "decl/plain":
            decls = tree
        else:
            if not (isinstance(tree, list) and len(tree) == 2):
                raise CorpusFormatError(
                    f"line {entry.line}: declaration-with-assumption must be "
                    f"a [decls,assumption] pair")
            decls, assumption = tree
            sort_check(from_list_format(assumption))
        for pair in decls:
            if not (isinstance(pair, list) and len(pair) == 2
                    and pair[1] in ("set", "element")):
                raise CorpusFormatError(
                    f"line {entry.line}: bad declaration pair {print_list(pair)}")
    elif entry.kind != "note":
        f = formula_from_string(entry.formalization)
        sort_check(f)


def parse_corpus(text: str, path: str = "<corpus>") -> List[CorpusEntry]:
    entries: List[CorpusEntry] = []
    block: List[Tuple[int, str]] = []

    def flush():
        if not block:
            return
        lines = [(n, l) for n, l in block]
        if len(lines) < 3:
            raise CorpusFormatError(
                f"{path}:{lines[0][0]}: block needs sentence, kind and "
                f"formalization lines")
        note = None
        if len(lines) >= 4:
            if not lines[3][1].startswith("note:"):
                raise CorpusFormatError(
                    f"{path}:{lines[3][0]}: fourth line must be a note:")
            note = lines[3][1][len("note:"):].strip()
        if len(lines) > 4:
            raise CorpusFormatError(f"{path}:{lines[4][0]}: too many lines in block")
        kind = lines[1][1].strip()
        if kind not in _KIND_STRINGS:
            raise CorpusFormatError(
                f"{path}:{lines[1][0]}: unknown kind {kind!r}")
        entry = CorpusEntry(lines[0][1].strip(), kind, lines[2][1].strip(),
                            note, lines[0][0])
        try:
            _validate_formalization(entry)
        except MalformedList as exc:
            raise CorpusFormatError(f"{path}:{lines[2][0]}: {exc}") from exc
        entries.append(entry)
        block.clear()

    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("#"):
            continue
        if not stripped:
            flush()
            continue
        block.append((lineno, stripped))
    flush()
    return entries


def load_corpus(path: str) -> List[CorpusEntry]:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh.read(), path)


def shipped_corpus_text() -> str:
    return resources.files("setproof.data").joinpath("corpus.txt").read_text("utf-8")


def load_shipped_corpus() -> List[CorpusEntry]:
    return parse_corpus(shipped_corpus_text(), "corpus.txt")


@dataclass(frozen=True)
class EntryResult:
    entry: CorpusEntry
    passed: bool
    got_kind: Optional[str]
    got_formalization: Optional[str]
    detail: str = ""


def score_entry(entry: CorpusEntry, backend=None) -> EntryResult:
    """Run one corpus sentence through a backend (default: the rule one)."""
    run = backend or (lambda raw: parse_sentence(raw, EMPTY_CONTEXT))
    outcome = run(entry.sentence)
    if not isinstance(outcome, Ok):
        return EntryResult(entry, False, None, None,
                           f"parse failed: {outcome!r}")
    record = outcome.record
    got_kind = kind_string(record.kind)
    got_formalization = print_list(record.content_list())
    passed = (got_kind == entry.kind
              and got_formalization == entry.formalization)
    return EntryResult(entry, passed, got_kind, got_formalization)


def score_corpus(entries, backend=None) -> List[EntryResult]:
    return [score_entry(e, backend) for e in entries]
