"""Mal-rules: diagnosing classic fallacies behind failed steps.

A rule is a set of premise patterns and a conclusion pattern over the list
representation of formulas, with ?metavariables. When an obligation comes
back Invalid or Undecided, every rule whose conclusion unifies with the
claim and whose premise patterns unify with some of the in-scope facts
(one consistent substitution across the whole rule) yields a diagnosis.

Matching is syntactic. The guard against nonsense rules is the self-check:
each rule is instantiated with fresh distinct variables and the decision
procedure must refute the instance.
"""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple

from .atp import Invalid, Obligation, brute_force_oracle
from .formula import EmptySet, SetEq, SetVar
from .listformat import (
    ListFormat, from_list_format, print_list, to_list_format,
)

Pattern = object  # ListFormat extended with "?name" atoms


class MalRuleFormatError(Exception):
    pass


class SelfCheckFailure(Exception):
    def __init__(self, offenders: List[str]):
        super().__init__("mal-rules are not invalid inferences: "
                         + ", ".join(offenders))
        self.offenders = offenders


@dataclass(frozen=True)
class MalRule:
    rule_id: str
    premises: Tuple[Pattern, ...]
    conclusion: Pattern
    message: str
    line: int = 0


@dataclass(frozen=True)
class Diagnosis:
    rule_id: str
    substitution: Dict[str, ListFormat]
    message: str


# --- pattern syntax ------------------------------------------------------------

def parse_pattern(s: str) -> Pattern:
    pos = 0

    def skip():
        nonlocal pos
        while pos < len(s) and s[pos] == " ":
            pos += 1

    def item() -> Pattern:
        nonlocal pos
        skip()
        if pos < len(s) and s[pos] == "[":
            pos += 1
            items = []
            skip()
            while True:
                items.append(item())
                skip()
                if pos < len(s) and s[pos] == ",":
                    pos += 1
                    continue
                if pos < len(s) and s[pos] == "]":
                    pos += 1
                    return items
                raise MalRuleFormatError(f"bad pattern {s!r} at offset {pos}")
        start = pos
        if pos < len(s) and s[pos] == "?":
            pos += 1
        while pos < len(s) and s[pos].isalnum():
            pos += 1
        atom = s[start:pos]
        if atom in ("", "?"):
            raise MalRuleFormatError(f"bad pattern {s!r} at offset {start}")
        return atom

    out = item()
    skip()
    if pos != len(s):
        raise MalRuleFormatError(f"trailing input in pattern {s!r}")
    return out


def _is_meta(x) -> bool:
    return isinstance(x, str) and x.startswith("?")


def unify(pattern: Pattern, tree: ListFormat,
          binding: Dict[str, ListFormat]) -> Optional[Dict[str, ListFormat]]:
    if _is_meta(pattern):
        bound = binding.get(pattern)
        if bound is None:
            out = dict(binding)
            out[pattern] = tree
            return out
        return binding if bound == tree else None
    if isinstance(pattern, str):
        return binding if pattern == tree else None
    if not isinstance(tree, list) or len(pattern) != len(tree):
        return None
    for p, t in zip(pattern, tree):
        binding = unify(p, t, binding)
        if binding is None:
            return None
    return binding


def _match_premises(patterns: Sequence[Pattern], trees: Sequence[ListFormat],
                    binding: Dict[str, ListFormat]) -> Optional[Dict[str, ListFormat]]:
    if not patterns:
        return binding
    head, rest = patterns[0], patterns[1:]
    for tree in trees:
        attempt = unify(head, tree, binding)
        if attempt is not None:
            solved = _match_premises(rest, trees, attempt)
            if solved is not None:
                return solved
    return None


# --- the library ----------------------------------------------------------------

def parse_library(text: str, path: str = "<malrules>") -> List[MalRule]:
    rules: List[MalRule] = []
    block: List[Tuple[int, str]] = []

    def flush():
        if not block:
            return
        rule_id = None
        premises: List[Pattern] = []
        conclusion = None
        message = None
        for lineno, line in block:
            key, _, rest = line.partition(" ")
            rest = rest.strip()
            if key == "rule":
                rule_id = rest
            elif key == "premise":
                premises.append(parse_pattern(rest))
            elif key == "conclusion":
                conclusion = parse_pattern(rest)
            elif key == "message":
                message = rest
            else:
                raise MalRuleFormatError(f"{path}:{lineno}: unknown key {key!r}")
        if not rule_id or conclusion is None or message is None:
            raise MalRuleFormatError(
                f"{path}:{block[0][0]}: a rule needs rule, conclusion and "
                f"message lines")
        rules.append(MalRule(rule_id, tuple(premises), conclusion, message,
                             block[0][0]))
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
    return rules


def load_library(path: Optional[str] = None) -> List[MalRule]:
    if path is None:
        text = resources.files("setproof.data").joinpath("malrules.txt") \
            .read_text("utf-8")
        return parse_library(text, "malrules.txt")
    with open(path, encoding="utf-8") as fh:
        return parse_library(fh.read(), path)


# --- diagnosing ------------------------------------------------------------------

def _render_message(template: str, binding: Dict[str, ListFormat]) -> str:
    out = template
    for meta in sorted(binding, key=len, reverse=True):
        out = out.replace(meta, print_list(binding[meta]))
    return out


def diagnose(failed: Obligation,
             library: Sequence[MalRule]) -> List[Diagnosis]:
    """All mal-rules matching a failed obligation (Invalid or Undecided)."""
    conclusion = to_list_format(failed.conclusion)
    premises = [to_list_format(p) for p in failed.premises]
    out: List[Diagnosis] = []
    for rule in library:
        binding = unify(rule.conclusion, conclusion, {})
        if binding is None:
            continue
        solved = _match_premises(rule.premises, premises, binding)
        if solved is None:
            continue
        out.append(Diagnosis(rule.rule_id, solved,
                             _render_message(rule.message, solved)))
    return out


# --- the self-check ---------------------------------------------------------------

def _meta_slots(rule: MalRule) -> Dict[str, str]:
    """Infer each metavariable's slot: formula, set term or element."""
    slots: Dict[str, str] = {}

    def note(meta: str, slot: str, where: str):
        old = slots.setdefault(meta, slot)
        if old != slot:
            raise MalRuleFormatError(
                f"rule {rule.rule_id}: {meta} used both as {old} and {slot} "
                f"({where})")

    def walk(p: Pattern, slot: str):
        if _is_meta(p):
            note(p, slot, rule.rule_id)
            return
        if isinstance(p, str):
            return
        if len(p) == 1 and p[0] == "falsum":
            return
        if len(p) == 2 and p[0] == "not":
            walk(p[1], "formula")
            return
        if len(p) == 2 and p[0] == "comp":
            walk(p[1], "term")
            return
        if len(p) == 3 and isinstance(p[1], str):
            kw = p[1]
            if kw in ("and", "or", "imp", "iff"):
                walk(p[0], "formula")
                walk(p[2], "formula")
                return
            if kw == "in":
                walk(p[0], "element")
                walk(p[2], "term")
                return
            if kw in ("subseteq", "eq"):
                walk(p[0], "term")
                walk(p[2], "term")
                return
            if kw in ("cup", "cap"):
                walk(p[0], "term")
                walk(p[2], "term")
                return
        raise MalRuleFormatError(
            f"rule {rule.rule_id}: unsupported pattern {print_list(p)!r}")

    for prem in rule.premises:
        walk(prem, "formula")
    walk(rule.conclusion, "formula")
    return slots


def canonical_instance(rule: MalRule) -> Obligation:
    """Instantiate metavariables with fresh distinct variables: formulas
    become distinct set atoms P1=∅, P2=∅, …; terms fresh set variables;
    element slots fresh element variables."""
    slots = _meta_slots(rule)
    binding: Dict[str, ListFormat] = {}
    counters = {"formula": 0, "term": 0, "element": 0}
    for meta in sorted(slots):
        slot = slots[meta]
        counters[slot] += 1
        n = counters[slot]
        if slot == "formula":
            binding[meta] = to_list_format(SetEq(SetVar(f"P{n}"), EmptySet()))
        elif slot == "term":
            binding[meta] = f"V{n}"
        else:
            binding[meta] = f"e{n}"

    def instantiate(p: Pattern) -> ListFormat:
        if _is_meta(p):
            return binding[p]
        if isinstance(p, str):
            return p
        return [instantiate(x) for x in p]

    premises = [from_list_format(instantiate(p)) for p in rule.premises]
    conclusion = from_list_format(instantiate(rule.conclusion))
    return Obligation(premises, conclusion)


def mal_rule_selfcheck(library: Sequence[MalRule],
                       max_universe: int = 3) -> List[Tuple[MalRule, object]]:
    """Check every rule denotes an invalid inference; raise on offenders."""
    report = []
    offenders = []
    for rule in library:
        ob = canonical_instance(rule)
        verdict = brute_force_oracle(ob, max_universe=max_universe)
        report.append((rule, verdict))
        if not isinstance(verdict, Invalid):
            offenders.append(f"{rule.rule_id} (line {rule.line})")
    if offenders:
        raise SelfCheckFailure(offenders)
    return report
