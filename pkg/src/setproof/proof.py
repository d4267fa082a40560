"""Proof structure: fold sentence records into scopes, goals and obligations.

Declarations, assumptions and facts live in a scope tree. "Suppose not."
against the current goal opens a contradiction subproof whose goal is
falsum; deriving falsum there discharges the refuted goal. Case labels
open sibling branches under the current goal; the split discharges the
goal only if every branch establishes it and the branch assumptions are
covered (an established disjunction, or an exhaustive pair phi / not phi).
A goal is discharged by an alpha-equal fact established in the scope where
it was announced — proving something under extra assumptions proves less.

Structure problems (redeclared or unknown variables, a qed with no goal,
an uncovered case split) are reported as values, never raised.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .atp import Obligation, Valid, decide
from .formula import (
    ExistsElem, ExistsSet, Falsum, Formula, Not, Or, SetEq, SetVar,
    alpha_eq, free_var_occurrences,
)
from .records import (
    Annotation, Assumption, Claim, Declaration, DeclarationPayload,
    GoalAnnouncement, SORT_SET, SentenceRecord,
)

FALSUM = Falsum()


@dataclass
class Goal:
    formula: Formula
    index: int                  # announcing sentence
    status: str = "open"        # open | discharged
    retired: bool = False       # no longer the active target after qed

    @property
    def discharged(self) -> bool:
        return self.status == "discharged"


@dataclass
class StructureError:
    code: str
    message: str
    index: int


@dataclass
class CaseBranch:
    number: int
    assumption: Optional[Formula] = None
    established: bool = False


@dataclass
class CaseSplit:
    goal: Goal
    branches: List[CaseBranch] = field(default_factory=list)
    closed: bool = False


@dataclass
class Scope:
    kind: str                   # top | assume | contradiction | case
    parent: Optional["Scope"] = None
    decls: Dict[str, str] = field(default_factory=dict)
    assumptions: List[Formula] = field(default_factory=list)
    facts: List[Tuple[Formula, int]] = field(default_factory=list)
    goals: List[Goal] = field(default_factory=list)
    refuted: Optional[Goal] = None          # contradiction scopes
    split: Optional[CaseSplit] = None       # scope owning a case split
    branch: Optional[CaseBranch] = None     # case scopes

    def path(self) -> List["Scope"]:
        out, s = [], self
        while s is not None:
            out.append(s)
            s = s.parent
        return list(reversed(out))


class ProofState:
    """Scope tree plus per-sentence log; one instance checks one document."""

    def __init__(self):
        self.root = Scope("top")
        self.current = self.root
        self.all_goals: List[Goal] = []
        self.obligations: List[Obligation] = []
        self.errors: List[StructureError] = []
        self.events: List[dict] = []

    # -- queries -----------------------------------------------------------------

    def declared_sort(self, name: str) -> Optional[str]:
        for scope in self.current.path():
            if name in scope.decls:
                return scope.decls[name]
        return None

    def facts_in_scope(self) -> List[Formula]:
        out: List[Formula] = []
        for scope in self.current.path():
            out.extend(scope.assumptions)
            out.extend(f for f, _i in scope.facts)
        return out

    def active_goal(self) -> Optional[Goal]:
        for scope in reversed(self.current.path()):
            for goal in reversed(scope.goals):
                if goal.status == "open" and not goal.retired:
                    return goal
        return None

    def _unknown_vars(self, f: Formula) -> List[str]:
        bad = []
        for name, sort in free_var_occurrences(f):
            if self.declared_sort(name) != sort and name not in bad:
                bad.append(name)
        return bad

    # -- the fold ----------------------------------------------------------------

    def apply(self, record: SentenceRecord) -> None:
        kind = record.kind
        if isinstance(kind, Declaration):
            self._apply_declaration(record)
        elif isinstance(kind, Assumption):
            self._apply_assumption(record)
        elif isinstance(kind, Claim):
            self._apply_claim(record)
        elif isinstance(kind, GoalAnnouncement):
            self._apply_goal(record)
        elif isinstance(kind, Annotation):
            self._apply_annotation(record)
        else:
            raise TypeError(f"unknown record kind: {kind!r}")

    def finish(self) -> None:
        """End of document: close whatever is still open (implicit qed)."""
        guard = 0
        while self.active_goal() is not None and guard < 1000:
            guard += 1
            self._qed(index=-1, implicit=True)
        while self.current.parent is not None:
            self._close_current_scope(index=-1)

    def goal_check(self) -> List[Goal]:
        return list(self.all_goals)

    # -- helpers -----------------------------------------------------------------

    def _error(self, code: str, message: str, index: int) -> None:
        self.errors.append(StructureError(code, message, index))

    def _decide_obligation(self, premises, conclusion, index) -> Obligation:
        ob = Obligation(list(premises), conclusion, origin=index)
        ob.verdict = decide(ob)
        self.obligations.append(ob)
        return ob

    def _check_vars(self, f: Formula, record: SentenceRecord,
                    extra: Dict[str, str] = {}) -> bool:
        bad = []
        for name, sort in free_var_occurrences(f):
            have = extra.get(name) or self.declared_sort(name)
            if have != sort and name not in bad:
                bad.append(name)
        if bad:
            self._error("UNKNOWN_VAR",
                        f"undeclared variable(s): {', '.join(bad)}",
                        record.index)
            return False
        return True

    def _add_fact(self, f: Formula, index: int) -> None:
        self.current.facts.append((f, index))
        self._match_goals(f, index)

    def _match_goals(self, f: Formula, index: int) -> None:
        scope = self.current
        for goal in scope.goals:
            if goal.status == "open" and alpha_eq(goal.formula, f):
                goal.status = "discharged"
                self.events.append({"event": "goal_discharged",
                                    "goal_index": goal.index, "at": index})
                if scope.kind == "contradiction" and isinstance(goal.formula, Falsum):
                    self._resolve_contradiction(scope, index)
                    return

    def _resolve_contradiction(self, scope: Scope, index: int) -> None:
        refuted = scope.refuted
        self.current = scope.parent
        if refuted is not None and refuted.status == "open":
            refuted.status = "discharged"
            self.events.append({"event": "goal_discharged",
                                "goal_index": refuted.index, "at": index})

    def _close_current_scope(self, index: int) -> None:
        if self.current.parent is None:
            return
        if self.current.kind == "case":
            self._close_case_branch(index, and_split=True)
            return
        self.current = self.current.parent

    # -- record kinds ------------------------------------------------------------

    def _apply_declaration(self, record: SentenceRecord) -> None:
        payload: DeclarationPayload = record.content
        new: Dict[str, str] = {}
        for name, sort in payload.decls:
            if self.declared_sort(name) is not None or name in new:
                self._error("REDECLARED_VAR",
                            f"variable {name} is already declared",
                            record.index)
                return
            new[name] = sort
        if payload.assumption is not None:
            if not self._check_vars(payload.assumption, record, extra=new):
                return
            if self._needs_witness(payload):
                conclusion = payload.assumption
                for name, sort in reversed(payload.decls):
                    ctor = ExistsSet if sort == SORT_SET else ExistsElem
                    conclusion = ctor(name, conclusion)
                self._decide_obligation(self.facts_in_scope(), conclusion,
                                        record.index)
        self.current.decls.update(new)
        if payload.assumption is not None:
            self.current.facts.append((payload.assumption, record.index))

    def _needs_witness(self, payload: DeclarationPayload) -> bool:
        if payload.witness_required is not None:
            return payload.witness_required
        assumption = payload.assumption
        new_names = {name for name, _sort in payload.decls}
        mentioned = {name for name, _sort in free_var_occurrences(assumption)}
        if mentioned <= new_names:
            # a pure hypothesis about the objects being introduced
            return False
        return not self._is_naming(assumption, new_names)

    @staticmethod
    def _is_naming(assumption: Formula, new_names: set) -> bool:
        """'Let U be their union' style: one bare new name equals a term."""
        if not isinstance(assumption, SetEq):
            return False
        for side, other in ((assumption.left, assumption.right),
                            (assumption.right, assumption.left)):
            if isinstance(side, SetVar) and side.name in new_names:
                other_names = {n for n, _s in free_var_occurrences(SetEq(other, other))}
                if side.name not in other_names:
                    return True
        return False

    def _apply_assumption(self, record: SentenceRecord) -> None:
        content: Formula = record.content
        if not self._check_vars(content, record):
            return
        goal = self.active_goal()
        if goal is not None and alpha_eq(content, Not(goal.formula)):
            scope = Scope("contradiction", parent=self.current,
                          assumptions=[content], refuted=goal)
            falsum_goal = Goal(FALSUM, record.index)
            scope.goals.append(falsum_goal)
            self.all_goals.append(falsum_goal)
            self.current = scope
            self.events.append({"event": "contradiction_opened",
                                "at": record.index})
            return
        if self.current.kind == "case" and self.current.branch is not None \
                and self.current.branch.assumption is None \
                and not self.current.assumptions:
            self.current.assumptions.append(content)
            self.current.branch.assumption = content
            return
        self.current = Scope("assume", parent=self.current,
                             assumptions=[content])

    def _apply_claim(self, record: SentenceRecord) -> None:
        content: Formula = record.content
        if not self._check_vars(content, record):
            return
        ob = self._decide_obligation(self.facts_in_scope(), content,
                                     record.index)
        if isinstance(ob.verdict, Valid):
            self._add_fact(content, record.index)

    def _apply_goal(self, record: SentenceRecord) -> None:
        content: Formula = record.content
        if not self._check_vars(content, record):
            return
        goal = Goal(content, record.index)
        self.current.goals.append(goal)
        self.all_goals.append(goal)

    def _apply_annotation(self, record: SentenceRecord) -> None:
        label = record.kind.label
        if label in ("proof", "other"):
            return
        if label == "qed":
            self._qed(record.index)
            return
        if label == "case":
            self._case_label(record.kind.case_number or 1, record.index)

    # -- qed and cases ------------------------------------------------------------

    def _qed(self, index: int, implicit: bool = False) -> None:
        # the innermost goal not yet closed, wherever it was announced
        target: Optional[Goal] = None
        scope = self.current
        while scope is not None:
            candidates = [g for g in scope.goals if not g.retired]
            if candidates:
                target = candidates[-1]
                break
            scope = scope.parent
        if target is None:
            if not implicit:
                self._error("QED_WITHOUT_GOAL", "qed without an open goal",
                            index)
            for g in self.all_goals:
                g.retired = True
            while self.current.parent is not None:
                self._close_current_scope(index)
            return
        # pop everything opened since the announcement; leaving a case
        # branch on the way evaluates its split
        while self.current is not scope and self.current.parent is not None:
            self._close_current_scope(index)
        target.retired = True

    def _case_label(self, number: int, index: int) -> None:
        if number == 1:
            goal = self.active_goal()
            if goal is None:
                self._error("CASE_WITHOUT_DISJUNCTION",
                            "case label without an open goal", index)
                return
            split = CaseSplit(goal)
            self.current.split = split
            branch = CaseBranch(1)
            split.branches.append(branch)
            scope = Scope("case", parent=self.current, branch=branch)
            self.current = scope
            return
        if self.current.kind != "case" or self.current.parent is None \
                or self.current.parent.split is None:
            self._error("CASE_WITHOUT_DISJUNCTION",
                        f"case {number} does not continue a case split", index)
            return
        owner = self.current.parent
        self._close_case_branch(index, and_split=False)
        branch = CaseBranch(number)
        owner.split.branches.append(branch)
        scope = Scope("case", parent=owner, branch=branch)
        self.current = scope

    def _close_case_branch(self, index: int, and_split: bool) -> None:
        scope = self.current
        while scope.kind == "assume":
            scope = scope.parent
        if scope.kind != "case":
            return
        split = scope.parent.split
        goal = split.goal
        scope.branch.established = any(
            alpha_eq(f, goal.formula) for f, _i in scope.facts)
        self.current = scope.parent
        if and_split:
            self._evaluate_split(self.current, index)

    def _evaluate_split(self, owner: Scope, index: int) -> None:
        split = owner.split
        if split is None or split.closed:
            return
        split.closed = True
        owner.split = None
        goal = split.goal
        branches = split.branches
        if any(b.assumption is None for b in branches):
            self._error("CASE_WITHOUT_DISJUNCTION",
                        "a case branch carries no assumption", index)
            return
        if not all(b.established for b in branches):
            return  # goal stays open; reported by goal_check
        if self._cases_covered([b.assumption for b in branches]):
            if goal.status == "open":
                goal.status = "discharged"
                self.events.append({"event": "goal_discharged",
                                    "goal_index": goal.index, "at": index})
        else:
            self._error("CASE_WITHOUT_DISJUNCTION",
                        "case assumptions are not covered by an established "
                        "disjunction or an exhaustive pair", index)

    def _cases_covered(self, assumptions: Sequence[Formula]) -> bool:
        if len(assumptions) == 2:
            a, b = assumptions
            if alpha_eq(Not(a), b) or alpha_eq(a, Not(b)):
                return True
        for fact in self.facts_in_scope():
            parts = _flatten_or(fact)
            if len(parts) == len(assumptions):
                remaining = list(parts)
                for a in assumptions:
                    for p in remaining:
                        if alpha_eq(a, p):
                            remaining.remove(p)
                            break
                if not remaining:
                    return True
        return False


def _flatten_or(f: Formula) -> List[Formula]:
    if isinstance(f, Or):
        return _flatten_or(f.left) + _flatten_or(f.right)
    return [f]


def check_records(records: Sequence[SentenceRecord]) -> ProofState:
    state = ProofState()
    for record in records:
        state.apply(record)
    state.finish()
    return state
