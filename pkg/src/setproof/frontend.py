"""Document-level formalization with the minimal-context retry loop.

Each sentence is first parsed with no context window at all. Only when
that fails with "missing context" does the window grow: first the
immediately preceding sentence, then one more earlier sentence per retry,
back to the first. Declared variables are not part of the window — every
prior declaration is always ambient, which keeps re-parsing stable however
large the window gets.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .context import ContextView
from .grammar import parse_sentence
from .records import Declaration, MissingContext, Ok, ParseOutcome, SentenceRecord
from .segment import Segment, SegmentIssue, segment


@dataclass
class DocumentResult:
    segments: List[Segment]
    outcomes: List[ParseOutcome]
    context_used: List[int]        # context sentences consumed per sentence
    issues: List[SegmentIssue] = field(default_factory=list)
    transport_error: Optional[str] = None

    def records(self) -> List[SentenceRecord]:
        return [o.record for o in self.outcomes if isinstance(o, Ok)]


def formalize_document(text: str) -> DocumentResult:
    segments, issues = segment(text)
    outcomes: List[ParseOutcome] = []
    context_used: List[int] = []
    prior: List[Optional[SentenceRecord]] = []  # None for non-Ok sentences
    declared: Dict[str, str] = {}

    for i, seg in enumerate(segments):
        outcome: ParseOutcome = MissingContext()
        used = 0
        for k in range(0, i + 1):
            window = [r for r in prior[i - k:i] if r is not None]
            ctx = ContextView.build(window, declared=declared)
            outcome = parse_sentence(seg.raw, ctx, index=i)
            used = k
            if not isinstance(outcome, MissingContext):
                break
        outcomes.append(outcome)
        context_used.append(used)
        if isinstance(outcome, Ok):
            prior.append(outcome.record)
            if isinstance(outcome.record.kind, Declaration):
                for name, sort in outcome.record.content.decls:
                    declared.setdefault(name, sort)
        else:
            prior.append(None)

    return DocumentResult(segments, outcomes, context_used, issues)
