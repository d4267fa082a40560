"""Feedback assembly: everything the pipeline found, anchored to sentences.

The report is the one wire contract of the system: the CLI's --json output
and the HTTP service both emit exactly the JSON shape produced by
``CheckReport.to_json``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from .atp import Countermodel, Invalid as AtpInvalid, Undecided
from .frontend import DocumentResult
from .malrules import Diagnosis
from .proof import ProofState
from .records import (
    Invalid, JUSTIFICATION_REASON, MissingContext, Ok, kind_string,
)

SEVERITIES = ("error", "warning", "info", "success")


@dataclass(frozen=True)
class FeedbackItem:
    index: Optional[int]           # None = document level
    severity: str
    code: str
    message: str
    countermodel: Optional[Countermodel] = None
    mal_rules: tuple = ()

    def to_json(self) -> dict:
        out = {"index": self.index, "severity": self.severity,
               "code": self.code, "message": self.message}
        if self.countermodel is not None:
            out["countermodel"] = self.countermodel.to_json()
        if self.mal_rules:
            out["malRules"] = list(self.mal_rules)
        return out


@dataclass(frozen=True)
class SentenceInfo:
    index: int
    raw: str
    kind: Optional[str]
    formalization: Optional[str]
    status: str

    def to_json(self) -> dict:
        return {"index": self.index, "raw": self.raw, "kind": self.kind,
                "formalization": self.formalization, "status": self.status}


@dataclass(frozen=True)
class CheckReport:
    verdict: str                   # Accepted | AcceptedWithWarnings | Rejected
    sentences: List[SentenceInfo]
    items: List[FeedbackItem]

    def to_json(self) -> dict:
        return {"verdict": self.verdict,
                "sentences": [s.to_json() for s in self.sentences],
                "items": [i.to_json() for i in self.items]}

    def render_text(self) -> str:
        lines = [f"verdict: {self.verdict}"]
        for item in self.items:
            where = "doc" if item.index is None else f"s{item.index + 1}"
            lines.append(f"{where} [{item.severity}] {item.code}: {item.message}")
            if item.countermodel is not None:
                lines.extend("    " + l for l in
                             item.countermodel.render().splitlines())
        return "\n".join(lines)


def assemble(doc: DocumentResult, state: Optional[ProofState],
             diagnoses: Optional[Dict[int, List[Diagnosis]]] = None) -> CheckReport:
    diagnoses = diagnoses or {}
    items: List[FeedbackItem] = []

    for issue in doc.issues:
        items.append(FeedbackItem(None, "warning", issue.code, issue.message))
    if doc.transport_error:
        items.append(FeedbackItem(None, "error", "TRANSPORT_ERROR",
                                  doc.transport_error))

    for i, outcome in enumerate(doc.outcomes):
        if isinstance(outcome, Invalid):
            if outcome.reason == JUSTIFICATION_REASON:
                items.append(FeedbackItem(
                    i, "error", "JUSTIFIED_CLAIM_UNSUPPORTED",
                    "justified claims (\"since …\", \"… because …\") are not "
                    "part of the controlled language; state the claim and "
                    "its grounds as separate sentences"))
            else:
                items.append(FeedbackItem(i, "error", "PARSE_INVALID",
                                          outcome.reason))
        elif isinstance(outcome, MissingContext):
            items.append(FeedbackItem(
                i, "error", "MISSING_CONTEXT",
                "this sentence needs information from earlier sentences "
                "that could not be found"))

    if state is not None:
        for err in state.errors:
            items.append(FeedbackItem(err.index, "error", err.code, err.message))
        for ob in state.obligations:
            if isinstance(ob.verdict, AtpInvalid):
                found = diagnoses.get(ob.origin, [])
                items.append(FeedbackItem(
                    ob.origin, "error", "STEP_NOT_JUSTIFIED",
                    "this step does not follow from what is established",
                    countermodel=ob.verdict.countermodel,
                    mal_rules=tuple(d.rule_id for d in found)))
                for d in found:
                    items.append(FeedbackItem(ob.origin, "info", "MAL_RULE",
                                              d.message,
                                              mal_rules=(d.rule_id,)))
            elif isinstance(ob.verdict, Undecided):
                items.append(FeedbackItem(
                    ob.origin, "warning", "STEP_UNDECIDED",
                    f"could not verify this step ({ob.verdict.reason})"))
        for goal in state.goal_check():
            if goal.discharged:
                items.append(FeedbackItem(goal.index, "success", "GOAL_OK",
                                          "goal established"))
            else:
                items.append(FeedbackItem(goal.index, "error", "GOAL_OPEN",
                                          "this goal is never established"))

    items.sort(key=lambda it: (it.index if it.index is not None else 10 ** 9,
                               SEVERITIES.index(it.severity)))

    sentences = []
    for i, (seg, outcome) in enumerate(zip(doc.segments, doc.outcomes)):
        if isinstance(outcome, Ok):
            status = "ok"
            kind = kind_string(outcome.record.kind)
            formalization = outcome.record.to_string()
        elif isinstance(outcome, MissingContext):
            status, kind, formalization = "missing_context", None, None
        else:
            status, kind, formalization = "invalid", None, None
        worst = _worst_severity(items, i)
        if worst == "error":
            status = status if status != "ok" else "error"
        elif worst == "warning" and status == "ok":
            status = "warning"
        sentences.append(SentenceInfo(i, seg.raw, kind, formalization, status))

    has_error = any(it.severity == "error" for it in items)
    has_warning = any(it.severity == "warning" for it in items)
    goals_done = state is None or all(g.discharged for g in state.goal_check())
    if not has_error and goals_done:
        verdict = "AcceptedWithWarnings" if has_warning else "Accepted"
    else:
        verdict = "Rejected"
    return CheckReport(verdict, sentences, items)


def report_json(report: CheckReport) -> str:
    """The one JSON serialization shared by the CLI and the service."""
    import json
    return json.dumps(report.to_json(), ensure_ascii=False, indent=2)


def _worst_severity(items: Sequence[FeedbackItem], index: int) -> Optional[str]:
    worst = None
    for it in items:
        if it.index != index:
            continue
        if worst is None or SEVERITIES.index(it.severity) < SEVERITIES.index(worst):
            worst = it.severity
    return worst
