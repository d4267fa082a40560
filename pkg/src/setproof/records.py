"""Sentence records: what one parsed sentence of the controlled language is.

Every sentence gets a kind (declaration, assumption, claim, goal
announcement or annotation), the ordered list of identifiers it mentions,
and its formal content. Records serialize to the internal triple
``[[vars],tag,content]`` with the kind tags ``decl``, ``ang`` (assumption),
``beh`` (claim), ``ziel`` (goal) and ``note`` (annotation).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .formula import Formula, free_vars_ordered
from .listformat import ListFormat, print_list, to_list_format

SORT_SET = "set"
SORT_ELEMENT = "element"


@dataclass(frozen=True)
class Declaration:
    with_assumption: bool = False


@dataclass(frozen=True)
class Assumption:
    pass


@dataclass(frozen=True)
class Claim:
    pass


@dataclass(frozen=True)
class GoalAnnouncement:
    pass


@dataclass(frozen=True)
class Annotation:
    # label: "proof" | "qed" | "case" | "other"; case annotations carry n >= 1
    label: str
    case_number: Optional[int] = None


def kind_tag(kind) -> str:
    if isinstance(kind, Declaration):
        return "decl"
    if isinstance(kind, Assumption):
        return "ang"
    if isinstance(kind, Claim):
        return "beh"
    if isinstance(kind, GoalAnnouncement):
        return "ziel"
    if isinstance(kind, Annotation):
        return "note"
    raise TypeError(f"not a sentence kind: {kind!r}")


def kind_string(kind) -> str:
    """The ``kind`` or ``kind/subtype`` form used by the corpus format."""
    tag = kind_tag(kind)
    if isinstance(kind, Declaration):
        return tag + ("/assmpt" if kind.with_assumption else "/plain")
    return tag


@dataclass(frozen=True)
class DeclarationPayload:
    decls: Tuple[Tuple[str, str], ...]      # (identifier, sort)
    assumption: Optional[Formula] = None
    # pick-one style introductions always owe a witness check, naming
    # equations never do; None leaves the decision to the structure layer.
    witness_required: Optional[bool] = None

    def to_list(self) -> ListFormat:
        decls = [[name, sort] for name, sort in self.decls]
        if self.assumption is None:
            return decls
        return [decls, to_list_format(self.assumption)]


@dataclass(frozen=True)
class SentenceRecord:
    index: int
    raw: str
    vars: Tuple[str, ...]
    kind: object
    content: object  # Formula | DeclarationPayload | None
    needs_context: bool = False

    def content_list(self) -> ListFormat:
        if self.content is None:
            return []
        if isinstance(self.content, DeclarationPayload):
            return self.content.to_list()
        return to_list_format(self.content)

    def to_list(self) -> ListFormat:
        return [list(self.vars), kind_tag(self.kind), self.content_list()]

    def to_string(self) -> str:
        return print_list(self.to_list())


def record_vars(kind, content) -> Tuple[str, ...]:
    """Identifiers of a record in first-occurrence order: declared names
    first, then the free variables of the formal content."""
    seen: List[str] = []

    def add(name: str):
        if name not in seen:
            seen.append(name)

    if isinstance(content, DeclarationPayload):
        for name, _sort in content.decls:
            add(name)
        if content.assumption is not None:
            for name in free_vars_ordered(content.assumption):
                add(name)
    elif isinstance(content, Formula):
        for name in free_vars_ordered(content):
            add(name)
    return tuple(seen)


def make_record(index: int, raw: str, kind, content,
                needs_context: bool = False) -> SentenceRecord:
    return SentenceRecord(index, raw, record_vars(kind, content), kind,
                          content, needs_context)


# --- parse outcomes -------------------------------------------------------------

@dataclass(frozen=True)
class Ok:
    record: SentenceRecord


@dataclass(frozen=True)
class Invalid:
    reason: str
    span: Optional[Tuple[int, int]] = None


@dataclass(frozen=True)
class MissingContext:
    pass


ParseOutcome = object  # Ok | Invalid | MissingContext

JUSTIFICATION_REASON = "justified claims unsupported"
