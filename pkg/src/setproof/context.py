"""Context for anaphors and elliptic sentences.

A ContextView is an immutable snapshot of what earlier sentences provide:
the declared variables with their sorts (always ambient — the formalizer
supplies every prior declaration regardless of how many context sentences
were admitted), plus the admitted window of prior records from which the
pronoun antecedents, the current goal and the last existential claim are
read. The window is what the minimal-context retry loop grows.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .formula import (
    ElemVar, ExistsElem, ExistsSet, Formula, Not, SetVar, free_vars,
    subst_elem, subst_set,
)
from .records import (
    Annotation, Claim, Declaration, DeclarationPayload, GoalAnnouncement,
    SORT_ELEMENT, SORT_SET, SentenceRecord,
)


class MissingContextError(Exception):
    """The sentence needs an antecedent the admitted context does not offer."""


def var_sort(name: str, declared: Dict[str, str]) -> str:
    """Declared sort if known, else the surface convention: lower-case
    initials are element variables, upper-case initials set variables."""
    if name in declared:
        return declared[name]
    return SORT_ELEMENT if name[0].islower() else SORT_SET


@dataclass(frozen=True)
class ContextView:
    records: Tuple[SentenceRecord, ...] = ()
    declared: Dict[str, str] = field(default_factory=dict)
    last_goal: Optional[Formula] = None
    last_entities: Tuple[Tuple[str, str], ...] = ()
    last_existential: Optional[Tuple[str, str, Formula]] = None

    @classmethod
    def build(cls, window: Sequence[SentenceRecord],
              declared: Optional[Dict[str, str]] = None) -> "ContextView":
        """Assemble a view from the admitted window of prior records.

        ``declared`` defaults to the declarations found in the window; the
        formalizer passes the full document-so-far map instead.
        """
        decl_map: Dict[str, str] = dict(declared) if declared is not None else {}
        if declared is None:
            for rec in window:
                if isinstance(rec.kind, Declaration):
                    for name, sort in rec.content.decls:
                        decl_map.setdefault(name, sort)

        goal_stack: List[Formula] = []
        for rec in window:
            if isinstance(rec.kind, GoalAnnouncement):
                goal_stack.append(rec.content)
            elif isinstance(rec.kind, Annotation) and rec.kind.label == "qed":
                if goal_stack:
                    goal_stack.pop()

        entities: List[Tuple[str, str]] = []
        for rec in reversed(window):
            for name in reversed(rec.vars):
                entry = (name, var_sort(name, decl_map))
                if entry not in entities:
                    entities.append(entry)

        existential: Optional[Tuple[str, str, Formula]] = None
        for rec in reversed(window):
            if isinstance(rec.kind, Claim):
                if isinstance(rec.content, ExistsSet):
                    existential = (rec.content.var, SORT_SET, rec.content.body)
                    break
                if isinstance(rec.content, ExistsElem):
                    existential = (rec.content.var, SORT_ELEMENT, rec.content.body)
                    break

        return cls(tuple(window), decl_map,
                   goal_stack[-1] if goal_stack else None,
                   tuple(entities), existential)


EMPTY_CONTEXT = ContextView()


def resolve_suppose_not(ctx: ContextView) -> Formula:
    """'Suppose not.' / 'Suppose otherwise.' negate the current goal."""
    if ctx.last_goal is None:
        raise MissingContextError("no goal announcement in reach")
    return Not(ctx.last_goal)


def resolve_anaphor(slot_sort: Optional[str], ctx: ContextView) -> str:
    """Most recent entity whose sort fits the slot; None accepts either."""
    for name, sort in ctx.last_entities:
        if slot_sort is None or sort == slot_sort:
            return name
    raise MissingContextError(f"no antecedent of sort {slot_sort or 'any'}")


def resolve_pick_one(ctx: ContextView,
                     name_hint: Optional[str] = None) -> DeclarationPayload:
    """'Pick one{, and call it p}.' introduces a witness for the most
    recent existential claim; the witness obligation stays with the step."""
    if ctx.last_existential is None:
        raise MissingContextError("no existential claim in reach")
    var, sort, matrix = ctx.last_existential
    taken = set(ctx.declared)
    s, e = free_vars(matrix)
    taken |= set(s) | set(e)
    fresh = None
    for candidate in ([name_hint] if name_hint else []) + [var] + \
            [f"{var}{i}" for i in range(1, 100)]:
        if candidate not in taken:
            fresh = candidate
            break
    if fresh is None:
        raise MissingContextError("no fresh name available")
    if sort == SORT_SET:
        assumption = subst_set(matrix, var, SetVar(fresh))
    else:
        assumption = subst_elem(matrix, var, ElemVar(fresh))
    return DeclarationPayload(((fresh, sort),), assumption, witness_required=True)
