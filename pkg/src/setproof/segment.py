"""Split a proof document into sentences.

Sentences end at '.', '!' or '?'. Annotation labels are their own
sentences: "Proof:" and "Case n:" (the colon belongs to the label), and
the closers "qed", "q.e.d." — whose inner periods must not split. Math
material never contains a sentence terminator, so no further lookahead is
needed. Trailing text without a terminator is still returned, flagged as
unterminated rather than dropped.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Tuple

_ANNOTATION_RE = re.compile(
    r"(proof\s*:|case\s+[0-9]+\s*:|q\.e\.d\.?|qed\.?)", re.IGNORECASE)
_TERMINATORS = ".!?"


@dataclass(frozen=True)
class Segment:
    raw: str
    start: int  # byte offsets into the UTF-8 document
    end: int


@dataclass(frozen=True)
class SegmentIssue:
    code: str
    message: str
    start: int
    end: int


def _byte_offsets(text: str) -> List[int]:
    offsets = [0]
    total = 0
    for ch in text:
        total += len(ch.encode("utf-8"))
        offsets.append(total)
    return offsets


def segment(text: str) -> Tuple[List[Segment], List[SegmentIssue]]:
    offsets = _byte_offsets(text)
    segments: List[Segment] = []
    issues: List[SegmentIssue] = []
    i, n = 0, len(text)
    while i < n:
        while i < n and text[i].isspace():
            i += 1
        if i >= n:
            break
        m = _ANNOTATION_RE.match(text, i)
        if m and (m.end() >= n or text[m.end()].isspace()):
            segments.append(Segment(m.group(0), offsets[i], offsets[m.end()]))
            i = m.end()
            continue
        start = i
        while i < n and text[i] not in _TERMINATORS:
            i += 1
        if i < n:
            i += 1  # include the terminator
            segments.append(Segment(text[start:i].strip(), offsets[start], offsets[i]))
        else:
            raw = text[start:i].strip()
            segments.append(Segment(raw, offsets[start], offsets[i]))
            issues.append(SegmentIssue(
                "UNTERMINATED_SENTENCE",
                f"sentence has no terminator: {raw!r}",
                offsets[start], offsets[i]))
    return segments, issues
