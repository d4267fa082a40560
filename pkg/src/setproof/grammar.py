"""Rule-based parser for the controlled proof language.

One sentence comes in, one ParseOutcome goes out. The parser is a plain
backtracking recursive descent over a token list; cue phrases pick the
sentence kind, a small noun-phrase/predication grammar plus a symbolic
formula parser build the content. Everything is deterministic: the only
tolerance is case-insensitive cue words (typo tolerance is the LLM
backend's business, not ours).

Anaphors that need earlier sentences ("Suppose not.", a dangling "it",
"Pick one.") go through the ContextView; everything the sentence itself
provides ("their", "both", "itself", "vice versa", an elided predicate
with an in-sentence antecedent) is resolved locally.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

from .context import (
    ContextView, MissingContextError, resolve_anaphor, resolve_pick_one,
    resolve_suppose_not, var_sort,
)
from .formula import (
    And, Complement, Elem, ElemVar, EmptySet, ExistsElem, ExistsSet, Falsum,
    ForallElem, ForallSet, Formula, Iff, Implies, Intersection, Not, Or,
    SetEq, SetTerm, SetVar, Subset, Union, free_vars, is_identifier,
)
from .records import (
    Annotation, Assumption, Claim, Declaration, DeclarationPayload,
    GoalAnnouncement, Invalid, JUSTIFICATION_REASON, MissingContext, Ok,
    ParseOutcome, SORT_ELEMENT, SORT_SET, make_record,
)


class ParseFail(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


# --- tokens ---------------------------------------------------------------------

_SYMBOL_MAP = {
    "∪": "cup", "∩": "cap", "∅": "emptyset", "⊆": "subseteq", "⊂": "subseteq",
    "∈": "in", "∉": "notin", "=": "eq", "≠": "neq", "¬": "not", "∧": "and",
    "∨": "or", "→": "imp", "↔": "iff", "(": "(", ")": ")",
}

# ASCII spellings accepted inside symbolic material.
_WORD_ALIASES = {"cap": "cap", "cup": "cup", "sub": "subseteq", "in": "in",
                 "neq": "neq", "emptyset": "emptyset"}


@dataclass(frozen=True)
class Tok:
    kind: str  # "word" | "sym" | "punct"
    s: str     # lowercased for words, canonical for syms
    orig: str


def tokenize(text: str) -> List[Tok]:
    toks: List[Tok] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _SYMBOL_MAP:
            toks.append(Tok("sym", _SYMBOL_MAP[ch], ch))
            i += 1
            continue
        if ch.isalnum():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "-"):
                j += 1
            word = text[i:j]  # hyphens stay inside the word ("non-empty")
            toks.append(Tok("word", word.lower(), word))
            i = j
            continue
        if ch in ",.;:!?":
            toks.append(Tok("punct", ch, ch))
            i += 1
            continue
        if ch in "'’":  # isn't -> isn + t
            i += 1
            continue
        raise ParseFail(f"unexpected character {ch!r}")
    return toks


# --- cue tables (also served to the UI via /grammar) -------------------------------

ASSUMPTION_CUES = [
    "suppose not",
    "suppose otherwise",
    "suppose that",
    "assume that",
    "let us assume that",
    "let us take it as given that",
    "to see this , first suppose that",
    "suppose for contradiction that",
]

CLAIM_CUES = [
    "it follows that",
    "it now follows that",
    "from this , we get that",
    "from this we get that",
    "we get that",
    "it is thus excluded that",
    "it is excluded that",
    "by reductio ,",
    "by reductio",
    "thus ,", "thus",
    "hence ,", "hence",
    "therefore ,", "therefore",
    "consequently ,", "consequently",
    "moreover ,", "moreover",
    "so ,", "so",
    "then ,", "then",
]

_NEGATING_CLAIM_CUES = {"it is thus excluded that", "it is excluded that"}

GOAL_CUES = [
    "we will now show that",
    "we will show that",
    "we now show that",
    "we show that",
    "we need to show that",
    "we need to demonstrate that",
    "our goal is to see that",
    "our goal is to show that",
    "it remains to establish that",
    "it remains to show that",
    "it remains to establish",
    "as we will presently show ,",
]

DECLARATION_CUES = ["let", "pick", "choose", "consider"]

ANNOTATION_LABELS = ["Proof:", "qed", "q.e.d.", "Case 1:"]

_FILLERS = ["now", "first", "next", "finally"]

CONTRADICTION_BODIES = [
    "this is a contradiction",
    "we have reached a contradiction",
]

GRAMMAR_SUMMARY = {
    "assumption": ["Suppose that …", "Assume that …", "Let us assume that …",
                   "Suppose not.", "Suppose otherwise.",
                   "Let us take it as given that …",
                   "To see this, first suppose that …"],
    "claim": ["It follows that …", "Thus, …", "Hence …", "Therefore …",
              "Consequently, …", "From this, we get that …", "By reductio, …",
              "If …, then …", "This is a contradiction."],
    "goal": ["We will now show that …", "We show that …",
             "We need to show that …", "We need to demonstrate that …",
             "Our goal is to see that …", "It remains to establish …",
             "As we will presently show, …"],
    "declaration": ["Let A be a set.", "Let A, B be sets such that …",
                    "Let x be an element of X.", "Let A be a subset of B.",
                    "Consider sets A, B, C satisfying …",
                    "Pick one, and call it p.", "Choose an element x of A."],
    "annotation": ANNOTATION_LABELS,
}

_ANNOTATION_RE = re.compile(
    r"\A(?:(proof)\s*:|case\s+([0-9]+)\s*:|(q\.e\.d\.?|qed)\.?)\Z",
    re.IGNORECASE)

_JUSTIFICATION_RE = re.compile(r"\bbecause\b", re.IGNORECASE)
_SINCE_RE = re.compile(r"\A\s*since\b", re.IGNORECASE)

_ELEM_FRESH = ["x", "y", "z", "u", "v", "w"]
_SET_FRESH = ["X", "Y", "Z", "U", "V", "W"]

# Grammar vocabulary; everything else that looks like an identifier is one.
_KNOWN_WORDS = set("""
a an and are as assume be belong belongs both by call cannot case choose
complement complements consider contains contained demonstrate disjoint
disjointness does each element elements empty equal equals establish exactly
excluded exists fact first finally follows for from get given goal hence holds
if in intersection is isn it its itself least let moreover must need neither
next no non nonempty nor not now of one or otherwise our pairwise pick
presently proof qed reached reductio remains satisfying see set sets show
since so subset subsets such suppose take that the their then there therefore
this thus to union us versa vice we well whenever while will
""".split())


def _fresh_name(candidates: Sequence[str], used: set) -> str:
    for c in candidates:
        if c not in used:
            return c
    i = 1
    while True:
        for c in candidates:
            if f"{c}{i}" not in used:
                return f"{c}{i}"
        i += 1


# --- subjects ---------------------------------------------------------------------

@dataclass
class Subject:
    mode: str                 # single | plural | or | xor | it | both
    items: List[Tuple[SetTerm, Optional[str]]] = field(default_factory=list)


# --- the sentence parser ------------------------------------------------------------

class _P:
    def __init__(self, toks: List[Tok], ctx: ContextView):
        self.toks = toks
        self.pos = 0
        self.ctx = ctx
        self.entities: List[Tuple[str, str]] = []   # in-sentence, oldest first
        self.last_pair: List[SetTerm] = []
        self.last_pred: Optional[Tuple[Callable, Optional[str]]] = None
        self.last_binary: Optional[Tuple[Callable, SetTerm, SetTerm]] = None
        self.used_window = False
        used = set(self.ctx.declared)
        for t in toks:
            if t.kind == "word" and t.s not in _KNOWN_WORDS \
                    and is_identifier(t.orig):
                used.add(t.orig)
        self.used_names = used

    # -- cursor helpers --
    def peek(self, k: int = 0) -> Optional[Tok]:
        i = self.pos + k
        return self.toks[i] if i < len(self.toks) else None

    def next(self) -> Tok:
        t = self.peek()
        if t is None:
            raise ParseFail("unexpected end of sentence")
        self.pos += 1
        return t

    def at(self, *words: str) -> bool:
        for k, w in enumerate(words):
            t = self.peek(k)
            if t is None or t.s != w:
                return False
        return True

    def eat(self, *words: str) -> bool:
        if self.at(*words):
            self.pos += len(words)
            return True
        return False

    def expect(self, *words: str):
        if not self.eat(*words):
            t = self.peek()
            raise ParseFail(f"expected {' '.join(words)!r}, found "
                            f"{t.orig if t else 'end of sentence'!r}")

    def skip_commas(self):
        while self.at(","):
            self.pos += 1

    def done(self) -> bool:
        while self.peek() is not None and self.peek().kind == "punct" \
                and self.peek().s in ".!?":
            self.pos += 1
        return self.peek() is None

    def note_entity(self, name: str, sort: Optional[str] = None):
        entry = (name, sort or var_sort(name, self.ctx.declared))
        self.entities.append(entry)

    def resolve_it(self, slot_sort: Optional[str]) -> str:
        for name, sort in reversed(self.entities):
            if slot_sort is None or sort == slot_sort:
                return name
        self.used_window = True
        return resolve_anaphor(slot_sort, self.ctx)

    def ident(self) -> str:
        t = self.peek()
        if t is not None and t.kind == "word" and is_identifier(t.orig) \
                and (t.s not in _KNOWN_WORDS or len(t.orig) <= 2):
            self.pos += 1
            return t.orig
        raise ParseFail(f"expected an identifier, found "
                        f"{t.orig if t else 'end of sentence'!r}")

    # -- symbolic formulas ------------------------------------------------------

    def _math_sym(self) -> Optional[str]:
        t = self.peek()
        if t is None:
            return None
        if t.kind == "sym":
            return t.s
        if t.kind == "word" and t.s in _WORD_ALIASES:
            return _WORD_ALIASES[t.s]
        return None

    def math_term(self) -> SetTerm:
        left = self.math_term_inter()
        while self._math_sym() == "cup":
            self.next()
            left = Union(left, self.math_term_inter())
        return left

    def math_term_inter(self) -> SetTerm:
        left = self.math_term_atom()
        while self._math_sym() == "cap":
            self.next()
            left = Intersection(left, self.math_term_atom())
        return left

    def math_term_atom(self) -> SetTerm:
        sym = self._math_sym()
        if sym == "emptyset":
            self.next()
            return EmptySet()
        if sym == "(":
            saved = self.pos
            self.next()
            try:
                t = self.math_term()
            except ParseFail:
                self.pos = saved
                raise
            if self._math_sym() != ")":
                self.pos = saved
                raise ParseFail("unbalanced parenthesis in term")
            self.next()
            return t
        t = self.peek()
        if t is not None and t.kind == "word":
            if t.s in ("c", "comp") and self.peek(1) is not None \
                    and self.peek(1).kind == "sym" and self.peek(1).s == "(":
                self.pos += 2
                inner = self.math_term()
                if self._math_sym() != ")":
                    raise ParseFail("unbalanced parenthesis after complement")
                self.next()
                return Complement(inner)
            if is_identifier(t.orig) and t.s not in _WORD_ALIASES \
                    and (t.s not in _KNOWN_WORDS or len(t.orig) <= 2):
                self.pos += 1
                self.note_entity(t.orig)
                return SetVar(t.orig)
        raise ParseFail("expected a set term")

    def math_atom(self) -> Formula:
        saved = self.pos
        # elem-sorted atom: IDENT (in|notin) term
        t = self.peek()
        if t is not None and t.kind == "word" and is_identifier(t.orig):
            nxt = self.pos + 1
            if nxt < len(self.toks):
                s2 = self.toks[nxt]
                rel = s2.s if s2.kind == "sym" else _WORD_ALIASES.get(s2.s)
                if rel in ("in", "notin"):
                    name = self.next().orig
                    self.note_entity(name, SORT_ELEMENT)
                    self.next()
                    term = self.math_term()
                    atom = Elem(ElemVar(name), term)
                    return Not(atom) if rel == "notin" else atom
        try:
            left = self.math_term()
            rel = self._math_sym()
            if rel in ("eq", "neq", "subseteq"):
                self.next()
                right = self.math_term()
                if rel == "eq":
                    return SetEq(left, right)
                if rel == "neq":
                    return Not(SetEq(left, right))
                return Subset(left, right)
            raise ParseFail("expected a relation symbol")
        except ParseFail:
            self.pos = saved
        if self._math_sym() == "(":
            self.next()
            f = self.math_formula()
            if self._math_sym() != ")":
                raise ParseFail("unbalanced parenthesis in formula")
            self.next()
            return f
        raise ParseFail("expected a formula")

    def math_not(self) -> Formula:
        if self._math_sym() == "not":
            self.next()
            return Not(self.math_not())
        return self.math_atom()

    def math_formula(self) -> Formula:
        left = self.math_not()
        sym = self._math_sym()
        if sym == "and":
            self.next()
            return self._fold_math(left, "and")
        if sym == "or":
            self.next()
            return self._fold_math(left, "or")
        if sym == "imp":
            self.next()
            return Implies(left, self.math_formula())
        if sym == "iff":
            self.next()
            return Iff(left, self.math_formula())
        return left

    def _fold_math(self, left: Formula, op: str) -> Formula:
        ctor = And if op == "and" else Or
        left = ctor(left, self.math_not())
        while self._math_sym() == op:
            self.next()
            left = ctor(left, self.math_not())
        sym = self._math_sym()
        if sym == "imp":
            self.next()
            return Implies(left, self.math_formula())
        if sym == "iff":
            self.next()
            return Iff(left, self.math_formula())
        return left

    # -- noun-phrase terms --------------------------------------------------------

    def term(self) -> SetTerm:
        got = self.term_or_pair()
        if isinstance(got, list):
            raise ParseFail("a plural term is only allowed under union or "
                            "intersection")
        return got

    def term_or_pair(self):
        if self.eat("the", "empty", "set"):
            return EmptySet()
        if self.at("the", "union", "of"):
            self.pos += 3
            return self._binary_np(Union)
        if self.at("the", "intersection", "of"):
            self.pos += 3
            return self._binary_np(Intersection)
        if self.eat("the", "complement", "of"):
            return Complement(self.term())
        if self.eat("the", "complements", "of"):
            a = self.term()
            self.expect("and")
            b = self.term()
            self.last_pair = [a, b]
            return [Complement(a), Complement(b)]
        if self.at("their", "union") or self.at("their", "intersection"):
            which = self.peek(1).s
            if len(self.last_pair) < 2:
                self.used_window = True
                raise MissingContextError("'their' has no plural antecedent")
            self.pos += 2
            ctor = Union if which == "union" else Intersection
            return ctor(self.last_pair[0], self.last_pair[1])
        return self.math_term()

    def _binary_np(self, ctor) -> SetTerm:
        got = self.term_or_pair()
        if isinstance(got, list):
            out = got[0]
            for t in got[1:]:
                out = ctor(out, t)
            return out
        self.expect("and")
        right = self.term()
        self.last_pair = [got, right]
        return ctor(got, right)

    def name_list(self) -> List[str]:
        names = [self.ident()]
        while True:
            saved = self.pos
            if self.eat(",", "and") or self.eat("and") \
                    or self.eat("as", "well", "as") \
                    or self.eat(",", "as", "well", "as"):
                try:
                    names.append(self.ident())
                    continue
                except ParseFail:
                    self.pos = saved
                    break
            if self.at(","):
                t = self.peek(1)
                if t is not None and t.kind == "word" \
                        and is_identifier(t.orig) and t.s not in _KNOWN_WORDS:
                    self.pos += 1
                    names.append(self.ident())
                    continue
            break
        self.eat(",")  # stray comma before the verb ("Let A, B, C, be sets.")
        return names

    # -- propositions ------------------------------------------------------------

    def proposition(self) -> Formula:
        if self.at("if") or self.at("whenever"):
            return self.conditional()
        units = [self.unit()]
        ops: List[str] = []
        while True:
            saved = self.pos
            self.skip_commas()
            op = None
            if self.eat("and"):
                op = "and"
            elif self.eat("or"):
                op = "or"
            elif self.eat("while"):
                op = "and"
            elif self.eat("but"):
                op = "and"
            if op is None:
                self.pos = saved
                break
            try:
                units.append(self.unit())
                ops.append(op)
            except (ParseFail, MissingContextError):
                self.pos = saved
                break
        # fold: 'and' binds tighter than 'or'
        groups: List[Formula] = [units[0]]
        for op, u in zip(ops, units[1:]):
            if op == "and":
                groups[-1] = And(groups[-1], u)
            else:
                groups.append(u)
        out = groups[0]
        for g in groups[1:]:
            out = Or(out, g)
        return out

    def conditional(self) -> Formula:
        if not (self.eat("if") or self.eat("whenever")):
            raise ParseFail("expected a conditional")
        self.skip_commas()
        then_at = None
        for k in range(self.pos, len(self.toks)):
            if self.toks[k].kind == "word" and self.toks[k].s == "then":
                then_at = k
                break
        if then_at is None:
            raise ParseFail("conditional without 'then'")
        inner = _P(self.toks[self.pos:then_at], self.ctx)
        inner.entities = self.entities
        inner.last_pair = self.last_pair
        inner.last_pred = self.last_pred
        antecedent = inner.proposition()
        inner.skip_commas()
        if inner.peek() is not None:
            raise ParseFail("could not parse the condition")
        self.used_window = self.used_window or inner.used_window
        self.last_pair = inner.last_pair
        self.last_pred = inner.last_pred
        self.pos = then_at + 1
        self.skip_commas()
        consequent = self.proposition()
        return Implies(antecedent, consequent)

    def unit(self) -> Formula:
        for body in CONTRADICTION_BODIES:
            if self.eat(*body.split()):
                return Falsum()
        if self.eat("it", "holds", "that") or self.eat("it", "also", "holds", "that"):
            return self.proposition()
        if self.at("there"):
            return self.existential()
        if self.at("for", "all", "sets") or self.at("for", "all", "elements") \
                or self.at("for", "every", "set"):
            return self.universal_prefix()
        if self.at("each", "element", "of") or self.at("every", "element", "of") \
                or self.at("no", "element", "of"):
            return self.element_quantified()
        if self.at("every", "subset", "of") or self.at("each", "subset", "of"):
            return self.subset_quantified()
        if self.at("neither"):
            return self.neither_form()
        saved = self.pos
        try:
            return self.predication()
        except ParseFail:
            self.pos = saved
        except MissingContextError:
            raise
        return self.math_formula()

    def existential(self) -> Formula:
        self.expect("there")
        if not (self.eat("is") or self.eat("are") or self.eat("exists")):
            raise ParseFail("expected 'there is'")
        negated = self.eat("no")
        if not negated:
            if not (self.eat("a") or self.eat("an")):
                raise ParseFail("expected an article after 'there is'")
        if self.eat("set"):
            name = self.ident()
            self.expect("such", "that")
            body = self.proposition()
            f: Formula = ExistsSet(name, body)
            return Not(f) if negated else f
        if self.eat("element"):
            name = self.ident()
            self.expect("of")
            home = self.term()
            member = Elem(ElemVar(name), home)
            if self.eat("such", "that"):
                body = self.proposition()
                f = ExistsElem(name, And(member, body))
            else:
                f = ExistsElem(name, member)
            return Not(f) if negated else f
        raise ParseFail("only sets and elements exist in this fragment")

    def universal_prefix(self) -> Formula:
        self.expect("for")
        if self.eat("all", "sets"):
            names = self.name_list()
        elif self.eat("every", "set"):
            names = [self.ident()]
        elif self.eat("all", "elements"):
            raise ParseFail("universal element prefixes are written "
                            "'each element of …'")
        else:
            raise ParseFail("expected 'for all sets'")
        self.skip_commas()
        self.eat("it", "holds", "that")
        if self.at(":"):
            self.pos += 1
        self.skip_commas()
        body = self.proposition()
        for name in reversed(names):
            body = ForallSet(name, body)
        return body

    def element_quantified(self) -> Formula:
        negated = self.eat("no", "element", "of")
        if not negated:
            if not (self.eat("each", "element", "of")
                    or self.eat("every", "element", "of")):
                raise ParseFail("expected an element quantifier")
        home = self.term()
        var = _fresh_name(_ELEM_FRESH, self.used_names)
        subject = Subject("single", [(SetVar(var), var)])
        pred = self.verb_phrase(subject, bound_name=var, bound_sort=SORT_ELEMENT)
        if negated:
            pred = Not(pred)
        return ForallElem(var, Implies(Elem(ElemVar(var), home), pred))

    def subset_quantified(self) -> Formula:
        if not (self.eat("every", "subset", "of") or self.eat("each", "subset", "of")):
            raise ParseFail("expected a subset quantifier")
        home = self.term()
        var = _fresh_name(_SET_FRESH, self.used_names)
        subject = Subject("single", [(SetVar(var), var)])
        pred = self.verb_phrase(subject, bound_name=var, bound_sort=SORT_SET)
        return ForallSet(var, Implies(Subset(SetVar(var), home), pred))

    def neither_form(self) -> Formula:
        self.expect("neither")
        first = self.predication()
        if self.eat("nor", "vice", "versa"):
            if self.last_binary is None:
                raise ParseFail("'vice versa' needs a binary statement")
            build, a, b = self.last_binary
            return And(Not(first), Not(build(b, a)))
        if self.eat("nor"):
            second = self.unit()
            return And(Not(first), Not(second))
        raise ParseFail("'neither' without 'nor'")

    # -- predications --------------------------------------------------------------

    def subject(self) -> Subject:
        if self.eat("at", "least", "one", "of"):
            return Subject("or", self._subject_terms())
        if self.eat("exactly", "one", "of"):
            return Subject("xor", self._subject_terms())
        if self.eat("one", "of"):
            return Subject("or", self._subject_terms())
        if self.eat("both"):
            if len(self.last_pair) < 2:
                raise ParseFail("'both' has no antecedent pair")
            return Subject("plural", [(t, None) for t in self.last_pair])
        if self.eat("it"):
            return Subject("it")
        items = self._subject_terms()
        if len(items) >= 2:
            self.last_pair = [t for t, _n in items]
        return Subject("plural" if len(items) > 1 else "single", items)

    def _subject_terms(self) -> List[Tuple[SetTerm, Optional[str]]]:
        items = [self._subject_term()]
        while True:
            if self.eat(",", "and") or self.eat("and") \
                    or self.eat(",", "as", "well", "as") \
                    or self.eat("as", "well", "as"):
                items.append(self._subject_term())
                continue
            if self.at(","):
                save = self.pos
                self.pos += 1
                try:
                    items.append(self._subject_term())
                    continue
                except ParseFail:
                    self.pos = save
            break
        return items

    def _subject_term(self) -> Tuple[SetTerm, Optional[str]]:
        save = self.pos
        t = self.peek()
        if t is not None and t.kind == "word" and is_identifier(t.orig) \
                and (t.s not in _KNOWN_WORDS or len(t.orig) <= 2):
            nxt = self.peek(1)
            if nxt is None or nxt.kind != "sym" or nxt.s == ")":
                self.pos += 1
                self.note_entity(t.orig)
                return (SetVar(t.orig), t.orig)
            self.pos = save
        return (self.term(), None)

    def verb_phrase(self, subject: Subject, bound_name: Optional[str] = None,
                    bound_sort: Optional[str] = None) -> Formula:
        if self.eat("equals"):
            obj = self.term()
            build = lambda s: SetEq(_as_set(s), obj)  # noqa: E731
            self._remember_pred(build, SORT_SET)
            self.last_binary = (lambda a, b: SetEq(a, b),
                                _subject_only_term(subject), obj)
            return self._apply_set_pred(subject, build)
        if self.at("belongs", "to") or self.at("belong", "to"):
            self.pos += 2
            return self._membership_phrase(subject, negated=False)
        if self.eat("does", "not", "belong", "to"):
            return self._membership_phrase(subject, negated=True)
        if self.eat("contains"):
            name = self.ident()
            self.note_entity(name, SORT_ELEMENT)
            if subject.mode != "single":
                raise ParseFail("'contains' needs a single subject")
            home, _ = subject.items[0]
            self._remember_pred(lambda s: Elem(ElemVar(name), _as_set(s)),
                                SORT_SET)
            return Elem(ElemVar(name), home)

        negated = False
        if self.eat("is") or self.eat("are"):
            pass
        elif self.eat("isn", "t") or self.eat("aren", "t"):
            negated = True
        elif self.eat("cannot", "be") or self.eat("can", "not", "be"):
            negated = True
        elif self.eat("must", "be") or self.eat("must", "all", "be"):
            pass
        else:
            raise ParseFail("expected a verb")
        while self.eat("also") or self.eat("in", "fact") or self.eat("thus") \
                or self.eat("now") or self.eat("indeed") or self.eat("then"):
            pass
        if self.eat("not"):
            negated = not negated
        while self.eat("also") or self.eat("in", "fact"):
            pass
        return self.copula_complement(subject, negated,
                                      bound_name=bound_name,
                                      bound_sort=bound_sort)

    def _membership_phrase(self, subject: Subject, negated: bool) -> Formula:
        home = self.term()
        build = lambda s: Elem(_as_elem(s), home)  # noqa: E731
        self._remember_pred(build, SORT_ELEMENT)
        out = self._apply_elem_pred(subject, build, negated)
        # "x belongs to A, but not to B"
        saved = self.pos
        self.skip_commas()
        if self.eat("but", "not", "to") or self.eat("and", "not", "to"):
            second = self.term()
            out = And(out, self._apply_elem_pred(
                subject, lambda s: Elem(_as_elem(s), second), True))
        elif self.eat("but", "also", "to") or self.eat("and", "to"):
            second = self.term()
            out = And(out, self._apply_elem_pred(
                subject, lambda s: Elem(_as_elem(s), second), False))
        else:
            self.pos = saved
        return out

    def copula_complement(self, subject: Subject, negated: bool,
                          bound_name: Optional[str] = None,
                          bound_sort: Optional[str] = None) -> Formula:
        pieces: List[Formula] = []
        while True:
            pieces.append(self._one_complement(subject, negated,
                                               bound_name, bound_sort))
            saved = self.pos
            if self.eat("and"):
                t = self.peek()
                adjective_like = t is not None and t.kind == "word" and t.s in (
                    "empty", "non-empty", "nonempty", "disjoint", "equal",
                    "subsets", "elements", "a", "an", "not")
                if adjective_like:
                    if self.eat("not"):
                        negated = True
                    continue
            self.pos = saved
            break
        out = pieces[0]
        for p in pieces[1:]:
            out = And(out, p)
        return out

    def _one_complement(self, subject: Subject, negated: bool,
                        bound_name: Optional[str],
                        bound_sort: Optional[str]) -> Formula:
        if self.eat("empty"):
            build = lambda s: SetEq(_as_set(s), EmptySet())  # noqa: E731
            self._remember_pred(build, SORT_SET)
            return self._apply_set_pred(subject, build, negated=negated)
        if self.eat("non-empty") or self.eat("nonempty"):
            build = lambda s: SetEq(_as_set(s), EmptySet())  # noqa: E731
            self._remember_pred(build, SORT_SET)
            return self._apply_set_pred(subject, build, negated=not negated)
        if self.eat("a", "subset", "of") or self.eat("subsets", "of"):
            obj = self.term()
            build = lambda s: Subset(_as_set(s), obj)  # noqa: E731
            self._remember_pred(build, SORT_SET)
            self.last_binary = (lambda a, b: Subset(a, b),
                                _subject_only_term(subject), obj)
            return self._apply_set_pred(subject, build, negated=negated)
        if self.eat("an", "element", "of", "itself"):
            if subject.mode == "it":
                name = self.resolve_it(None)
            else:
                name = _subject_name(subject)
            build = lambda s: Elem(ElemVar(_subject_str(s)), SetVar(_subject_str(s)))  # noqa: E731
            self._remember_pred(build, None)
            out = Elem(ElemVar(name), SetVar(name))
            return Not(out) if negated else out
        if self.eat("an", "element", "of") or self.eat("elements", "of"):
            home = self.term()
            build = lambda s: Elem(_as_elem(s), home)  # noqa: E731
            self._remember_pred(build, SORT_ELEMENT)
            return self._apply_elem_pred(subject, build, negated)
        if self.eat("equal", "to"):
            obj = self.term()
            build = lambda s: SetEq(_as_set(s), obj)  # noqa: E731
            self._remember_pred(build, SORT_SET)
            self.last_binary = (lambda a, b: SetEq(a, b),
                                _subject_only_term(subject), obj)
            return self._apply_set_pred(subject, build, negated=negated)
        if self.eat("equal"):
            terms = _subject_terms(subject, self, SORT_SET)
            if len(terms) != 2:
                raise ParseFail("'are equal' needs exactly two subjects")
            out = SetEq(terms[0], terms[1])
            return Not(out) if negated else out
        if self.eat("disjoint", "from"):
            if self.eat("every", "set") or self.eat("each", "set"):
                var = _fresh_name(_SET_FRESH, self.used_names)
                build = lambda s: ForallSet(  # noqa: E731
                    var, SetEq(Intersection(_as_set(s), SetVar(var)), EmptySet()))
                self._remember_pred(build, SORT_SET)
                return self._apply_set_pred(subject, build, negated=negated)
            obj = self.term()
            build = lambda s: SetEq(Intersection(_as_set(s), obj), EmptySet())  # noqa: E731
            self._remember_pred(build, SORT_SET)
            self.last_binary = (lambda a, b: SetEq(Intersection(a, b), EmptySet()),
                                _subject_only_term(subject), obj)
            return self._apply_set_pred(subject, build, negated=negated)
        if self.eat("disjoint") or self.eat("pairwise", "disjoint"):
            terms = _subject_terms(subject, self, SORT_SET)
            if len(terms) < 2:
                raise ParseFail("'disjoint' needs at least two subjects")
            out = _pairwise_disjoint(terms)
            return Not(out) if negated else out
        if self.eat("contained", "in"):
            home = self.term()
            if _subject_sort(subject, self) == SORT_ELEMENT:
                build = lambda s: Elem(_as_elem(s), home)  # noqa: E731
                self._remember_pred(build, SORT_ELEMENT)
                return self._apply_elem_pred(subject, build, negated)
            build = lambda s: Subset(_as_set(s), home)  # noqa: E731
            self._remember_pred(build, SORT_SET)
            return self._apply_set_pred(subject, build, negated=negated)
        # bare copula: an elided predicate ("then B is.", "it isn't")
        t = self.peek()
        if t is None or (t.kind == "punct") or t.s in ("and", "or", "while",
                                                       "then", "nor", "but"):
            if self.last_pred is None:
                raise MissingContextError("elided predicate has no antecedent")
            build, slot = self.last_pred
            out = self._apply_any_pred(subject, build, slot, negated)
            return out
        raise ParseFail(f"unknown predicate near {t.orig!r}")

    # -- predicate application helpers ----------------------------------------------

    def _remember_pred(self, build: Callable, slot: Optional[str]):
        self.last_pred = (build, slot)

    def _apply_set_pred(self, subject: Subject, build: Callable,
                        negated: bool = False) -> Formula:
        return self._apply_any_pred(subject, build, SORT_SET, negated)

    def _apply_elem_pred(self, subject: Subject, build: Callable,
                         negated: bool) -> Formula:
        return self._apply_any_pred(subject, build, SORT_ELEMENT, negated)

    def _apply_any_pred(self, subject: Subject, build: Callable,
                        slot: Optional[str], negated: bool) -> Formula:
        def instance(item) -> Formula:
            out = build(item)
            return Not(out) if negated else out

        if subject.mode == "it":
            name = self.resolve_it(slot)
            item = (SetVar(name), name)
            return instance(item)
        if subject.mode == "single":
            return instance(subject.items[0])
        items = subject.items
        if subject.mode in ("plural", "both"):
            out = instance(items[0])
            for item in items[1:]:
                out = And(out, instance(item))
            return out
        if subject.mode == "or":
            out = instance(items[0])
            for item in items[1:]:
                out = Or(out, instance(item))
            return out
        if subject.mode == "xor":
            if len(items) != 2:
                raise ParseFail("'exactly one of' takes two alternatives")
            a, b = items
            pos_a, pos_b = build(a), build(b)
            if negated:
                raise ParseFail("'exactly one of' cannot be negated")
            return Or(And(pos_a, Not(pos_b)), And(Not(pos_a), pos_b))
        raise ParseFail("unsupported subject")

    def predication(self) -> Formula:
        subject = self.subject()
        return self.verb_phrase(subject)


# -- subject/item helpers (module level, they need no parser state) -----------------

def _as_set(item) -> SetTerm:
    term, _name = item
    return term


def _as_elem(item) -> ElemVar:
    term, name = item
    if name is None:
        raise ParseFail("only a named variable can be an element")
    return ElemVar(name)


def _subject_str(item) -> str:
    term, name = item
    if name is None:
        raise ParseFail("expected a named subject")
    return name


def _subject_name(subject: Subject) -> str:
    if subject.mode != "single":
        raise ParseFail("expected a single named subject")
    return _subject_str(subject.items[0])


def _subject_only_term(subject: Subject) -> Optional[SetTerm]:
    if subject.mode == "single":
        return subject.items[0][0]
    return None


def _subject_terms(subject: Subject, p: _P, slot: str) -> List[SetTerm]:
    if subject.mode == "it":
        name = p.resolve_it(slot)
        return [SetVar(name)]
    return [t for t, _n in subject.items]


def _subject_sort(subject: Subject, p: _P) -> str:
    if subject.mode == "it":
        return SORT_ELEMENT if any(s == SORT_ELEMENT
                                   for _n, s in reversed(p.entities)) else SORT_SET
    if subject.items and subject.items[0][1] is not None:
        return var_sort(subject.items[0][1], p.ctx.declared)
    return SORT_SET


def _pairwise_disjoint(terms: List[SetTerm]) -> Formula:
    pieces = []
    for i in range(len(terms)):
        for j in range(i + 1, len(terms)):
            pieces.append(SetEq(Intersection(terms[i], terms[j]), EmptySet()))
    out = pieces[0]
    for piece in pieces[1:]:
        out = And(out, piece)
    return out


def _conj(parts: List[Formula]) -> Optional[Formula]:
    if not parts:
        return None
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


# --- declarations -------------------------------------------------------------------

class _DeclParser(_P):
    """Extends the proposition parser with declaration bodies."""

    def declaration(self, verb: str) -> DeclarationPayload:
        decls: List[Tuple[str, str]] = []
        assumptions: List[Formula] = []
        witness: Optional[bool] = None
        while True:
            payload = self.sub_declaration(verb)
            if payload.witness_required:
                witness = True
            decls.extend(payload.decls)
            if payload.assumption is not None:
                assumptions.append(payload.assumption)
            if len(payload.decls) >= 2:
                self.last_pair = [SetVar(n) for n, _s in payload.decls]
            saved = self.pos
            self.skip_commas()
            if self.eat("and", "additionally") or self.eat("and"):
                nxt = self.peek()
                if nxt is not None and nxt.s in ("let", "pick", "choose",
                                                 "consider"):
                    verb = self.next().s
                    continue
            self.pos = saved
            break
        return DeclarationPayload(tuple(decls), _conj(assumptions),
                                  witness_required=witness)

    def sub_declaration(self, verb: str) -> DeclarationPayload:
        if verb in ("pick", "choose") and (self.at("one") or self.at("one", ",")):
            return self.pick_one()
        if verb == "consider":
            return self.noun_first()
        if verb in ("pick", "choose") and (self.at("a") or self.at("an")):
            return self.article_first()
        names = self.name_list()
        if verb in ("pick", "choose"):
            self.expect("to", "be")
        else:
            self.expect("be")
        return self.decl_rest(names)

    def pick_one(self) -> DeclarationPayload:
        self.expect("one")
        self.skip_commas()
        hint = None
        if self.eat("and", "call", "it") or self.eat("call", "it"):
            hint = self.ident()
        self.used_window = True
        return resolve_pick_one(self.ctx, hint)

    def noun_first(self) -> DeclarationPayload:
        # "Consider sets A, B, C satisfying F"
        if self.eat("sets") or self.eat("a", "set") or self.eat("the", "sets"):
            names = self.name_list()
            return self.decl_rest(names, noun_seen="set")
        if self.eat("elements") or self.eat("an", "element"):
            names = self.name_list()
            return self.decl_rest(names, noun_seen="element")
        raise ParseFail("only sets and elements can be introduced")

    def article_first(self) -> DeclarationPayload:
        # "Choose an element x of A."
        if not (self.eat("an", "element") or self.eat("a", "set")):
            raise ParseFail("only sets and elements can be introduced")
        introduced = self.toks[self.pos - 1].s  # "element" | "set"
        name = self.ident()
        if introduced == "element":
            self.expect("of")
            home = self.term()
            return DeclarationPayload(((name, SORT_ELEMENT),),
                                      Elem(ElemVar(name), home),
                                      witness_required=True)
        assumption = None
        if self.eat("such", "that") or self.eat("satisfying") or self.eat("with"):
            assumption = self.proposition()
        return DeclarationPayload(((name, SORT_SET),), assumption)

    def decl_rest(self, names: List[str],
                  noun_seen: Optional[str] = None) -> DeclarationPayload:
        # "let U be their union": a naming declaration, no noun at all
        if noun_seen is None and len(names) == 1 and \
                (self.at("their") or self.at("the")):
            named = self.term()
            return DeclarationPayload(((names[0], SORT_SET),),
                                      SetEq(SetVar(names[0]), named))
        adjectives: List[str] = []
        sort = noun_seen
        if sort is None:
            while True:
                if self.eat("non-empty") or self.eat("nonempty"):
                    adjectives.append("non-empty")
                    continue
                if self.eat("pairwise", "disjoint") or self.eat("disjoint"):
                    adjectives.append("disjoint")
                    continue
                break
            self.eat("a") or self.eat("an")
            while True:
                if self.eat("non-empty") or self.eat("nonempty"):
                    adjectives.append("non-empty")
                    continue
                if self.eat("pairwise", "disjoint") or self.eat("disjoint"):
                    adjectives.append("disjoint")
                    continue
                break
            noun = self.peek()
            if noun is None or noun.kind != "word":
                raise ParseFail("expected a noun in the declaration")
            if noun.s in ("set", "sets"):
                sort = SORT_SET
                self.pos += 1
            elif noun.s in ("element", "elements"):
                sort = SORT_ELEMENT
                self.pos += 1
            elif noun.s in ("subset", "subsets"):
                self.pos += 1
                self.expect("of")
                home = self.term()
                assumptions = [Subset(SetVar(n), home) for n in names]
                decls = tuple((n, SORT_SET) for n in names)
                return DeclarationPayload(decls, _conj(assumptions))
            else:
                raise ParseFail(f"unknown kind of object {noun.orig!r}")
        for n in names:
            self.note_entity(n, sort)
        if len(names) >= 2:
            self.last_pair = [SetVar(n) for n in names]

        assumptions: List[Formula] = []
        for adj in adjectives:
            if adj == "non-empty":
                assumptions.extend(Not(SetEq(SetVar(n), EmptySet())) for n in names)
            elif adj == "disjoint":
                assumptions.append(_pairwise_disjoint([SetVar(n) for n in names]))

        extra_decls: List[Tuple[str, str]] = []
        if sort == SORT_ELEMENT and self.eat("of"):
            home = self.term()
            assumptions.extend(Elem(ElemVar(n), home) for n in names)
            if self.eat("such", "that") or self.eat("satisfying") \
                    or self.eat("with"):
                assumptions.append(self.proposition())
        elif self.eat("such", "that") or self.eat("satisfying"):
            assumptions.append(self.proposition())
        elif self.eat("with"):
            got = self.with_rest(names)
            if got is not None:
                extra_decls.extend(got[0])
                assumptions.extend(got[1])
        else:
            # trailing adjectives after the noun: "be sets, non-empty"? no —
            # but "be non-empty sets" was handled; nothing more to consume.
            pass

        decls = tuple((n, sort) for n in names) + tuple(extra_decls)
        return DeclarationPayload(decls, _conj(assumptions))

    def with_rest(self, names: List[str]):
        if self.eat("non-empty", "intersection") or self.eat("nonempty", "intersection"):
            if len(names) < 2:
                raise ParseFail("'non-empty intersection' needs two sets")
            inter = SetVar(names[0])
            for n in names[1:]:
                inter = Intersection(inter, SetVar(n))
            return [], [Not(SetEq(inter, EmptySet()))]
        for which, ctor in (("intersection", Intersection), ("union", Union)):
            if self.eat(which):
                new = self.ident()
                if len(names) < 2:
                    raise ParseFail(f"'with {which}' needs two sets")
                combined = SetVar(names[0])
                for n in names[1:]:
                    combined = ctor(combined, SetVar(n))
                return [(new, SORT_SET)], [SetEq(combined, SetVar(new))]
        return [], [self.proposition()]


# --- the entry point -----------------------------------------------------------------

def _match_cue(toks: List[Tok], pos: int, cue: str) -> Optional[int]:
    words = cue.split()
    for k, w in enumerate(words):
        i = pos + k
        if i >= len(toks) or toks[i].s != w:
            return None
    return pos + len(words)


def _strip_fillers(toks: List[Tok], pos: int) -> int:
    changed = True
    while changed:
        changed = False
        t = toks[pos] if pos < len(toks) else None
        if t is not None and t.kind == "word" and t.s in _FILLERS:
            nxt = toks[pos + 1] if pos + 1 < len(toks) else None
            # only treat as filler when followed by a comma or a cue word,
            # never eat a whole sentence's subject
            if nxt is not None and (nxt.s == "," or nxt.s in (
                    "we", "it", "suppose", "assume", "let")):
                pos += 1
                if nxt.s == ",":
                    pos += 1
                changed = True
    return pos


def classify(toks: List[Tok]) -> Tuple[str, int, Optional[str]]:
    """Return (kind name, body start, matched cue) for one sentence."""
    pos = _strip_fillers(toks, 0)
    for cue in sorted(ASSUMPTION_CUES, key=len, reverse=True):
        end = _match_cue(toks, pos, cue)
        if end is not None:
            return "assumption", end, cue
    for cue in sorted(GOAL_CUES, key=len, reverse=True):
        end = _match_cue(toks, pos, cue)
        if end is not None:
            return "goal", end, cue
    t = toks[pos] if pos < len(toks) else None
    if t is not None and t.s in DECLARATION_CUES:
        return "declaration", pos + 1, t.s
    matched = None
    progressed = True
    while progressed:  # "Therefore, we get that ..." chains two cues
        progressed = False
        for cue in sorted(CLAIM_CUES, key=len, reverse=True):
            end = _match_cue(toks, pos, cue)
            if end is not None:
                matched, pos, progressed = cue, end, True
                break
    return "claim", pos, matched


def _body_tokens(toks: List[Tok], start: int) -> List[Tok]:
    body = toks[start:]
    while body and body[0].kind == "punct" and body[0].s == ",":
        body = body[1:]
    return body


def _close_elem_vars(f: Formula, declared) -> Formula:
    """Universally close element-sorted free variables of a bare
    conditional claim (undeclared lower-case names only)."""
    from .formula import free_vars_ordered
    to_close = [n for n in free_vars_ordered(f)
                if n not in declared and var_sort(n, declared) == SORT_ELEMENT
                and n in free_vars(f)[1]]
    for name in reversed(to_close):
        f = ForallElem(name, f)
    return f


def parse_sentence(raw: str, ctx: ContextView, index: int = 0) -> ParseOutcome:
    """Parse one segmented sentence against the given context."""
    stripped = raw.strip()
    m = _ANNOTATION_RE.match(stripped)
    if m:
        if m.group(1):
            kind = Annotation("proof")
        elif m.group(2):
            kind = Annotation("case", int(m.group(2)))
        else:
            kind = Annotation("qed")
        return Ok(make_record(index, raw, kind, None))

    if _SINCE_RE.match(stripped) or _JUSTIFICATION_RE.search(stripped):
        return Invalid(JUSTIFICATION_REASON)

    try:
        toks = tokenize(stripped)
    except ParseFail as exc:
        return Invalid(exc.reason)
    if not toks:
        return Invalid("empty sentence")

    kind_name, body_start, cue = classify(toks)
    body = _body_tokens(toks, body_start)

    try:
        if kind_name == "assumption":
            outcome = _parse_assumption(raw, ctx, index, cue, body)
        elif kind_name == "goal":
            outcome = _parse_goal(raw, ctx, index, cue, body)
        elif kind_name == "declaration":
            outcome = _parse_declaration(raw, ctx, index, cue, body)
        else:
            outcome = _parse_claim(raw, ctx, index, cue, body)
    except MissingContextError:
        return MissingContext()
    except ParseFail as exc:
        return Invalid(exc.reason)
    return _sort_checked(outcome)


def _sort_checked(outcome: ParseOutcome) -> ParseOutcome:
    from .formula import SortError, sort_check
    if not isinstance(outcome, Ok):
        return outcome
    content = outcome.record.content
    formula = content.assumption if isinstance(content, DeclarationPayload) \
        else content
    if isinstance(formula, Formula):
        try:
            sort_check(formula)
        except SortError as exc:
            return Invalid(f"ill-sorted sentence ({exc})")
    return outcome


def _finish_prop(p: _P) -> Formula:
    f = p.proposition()
    p.skip_commas()
    if not p.done():
        t = p.peek()
        raise ParseFail(f"could not parse the rest of the sentence near "
                        f"{t.orig!r}")
    return f


def _parse_assumption(raw, ctx, index, cue, body) -> ParseOutcome:
    if cue in ("suppose not", "suppose otherwise"):
        p = _P(body, ctx)
        if not p.done():
            raise ParseFail("nothing may follow 'Suppose not'")
        content = resolve_suppose_not(ctx)
        return Ok(make_record(index, raw, Assumption(), content,
                              needs_context=True))
    p = _P(body, ctx)
    content = _finish_prop(p)
    return Ok(make_record(index, raw, Assumption(), content,
                          needs_context=p.used_window))


def _parse_goal(raw, ctx, index, cue, body) -> ParseOutcome:
    p = _P(body, ctx)
    if cue == "it remains to establish" and not p.at("that"):
        content = _parse_nominal_goal(p)
        if not p.done():
            raise ParseFail("could not parse the goal")
    else:
        p.eat("that")
        content = _finish_prop(p)
    return Ok(make_record(index, raw, GoalAnnouncement(), content,
                          needs_context=p.used_window))


def _parse_nominal_goal(p: _P) -> Formula:
    if p.eat("the", "pairwise", "disjointness", "of") \
            or p.eat("the", "disjointness", "of"):
        names = p.name_list()
        if len(names) < 2:
            raise ParseFail("disjointness needs at least two sets")
        return _pairwise_disjoint([SetVar(n) for n in names])
    raise ParseFail("unknown goal phrase")


def _parse_claim(raw, ctx, index, cue, body) -> ParseOutcome:
    p = _P(body, ctx)
    content = _finish_prop(p)
    if cue in _NEGATING_CLAIM_CUES:
        content = Not(content)
    if isinstance(content, Implies) and body and body[0].s in ("if", "whenever"):
        content = _close_elem_vars(content, ctx.declared)
    return Ok(make_record(index, raw, Claim(), content,
                          needs_context=p.used_window))


def _parse_declaration(raw, ctx, index, cue, body) -> ParseOutcome:
    p = _DeclParser(body, ctx)
    payload = p.declaration(cue)
    p.skip_commas()
    if not p.done():
        t = p.peek()
        raise ParseFail(f"could not parse the rest of the declaration near "
                        f"{t.orig!r}")
    # "Let x be an element of X." with x already declared reads as a plain
    # assumption; the declaration form is the fresh-variable reading.
    if payload.assumption is not None and payload.decls and \
            all(name in ctx.declared for name, _sort in payload.decls):
        return Ok(make_record(index, raw, Assumption(), payload.assumption,
                              needs_context=p.used_window))
    kind = Declaration(with_assumption=payload.assumption is not None)
    return Ok(make_record(index, raw, kind, payload,
                          needs_context=p.used_window))
