"""Decision procedure for Boolean set theory obligations.

An obligation is a sequent: a list of premise formulas and one conclusion.
The quantifier-free fragment is decided exactly by a membership-valuation
translation. A point of a model is abstracted by its *region*: the vector
of memberships in the obligation's set variables. Every set term then
denotes a fixed bitmask over regions, and a model collapses to (a) which
regions are inhabited and (b) the region of each element variable. A
failing inclusion or equality atom needs at most one witness point, so
models with at most one inhabited region per Subset/SetEq atom (plus the
element points) suffice for completeness.

Element quantifiers range over inhabited regions and are decided exactly.
Set quantifiers are handled by instantiation (universals) and bounded
witness search (existentials); a failed search is reported as Undecided,
never Invalid.

``brute_force_oracle`` is the independent check: plain enumeration of all
universes up to a size bound with no region abstraction.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .formula import (
    And, Complement, Elem, ElemVar, EmptySet, ExistsElem, ExistsSet, Falsum,
    ForallElem, ForallSet, Formula, Iff, Implies, Intersection, Not, Or,
    QUANTIFIERS, SetEq, SetTerm, SetVar, Subset, Union,
    free_vars, subformulas, subst_elem, subst_set,
)


class FragmentExceeded(Exception):
    """The obligation uses quantification beyond what the procedure decides."""


# --- verdicts -------------------------------------------------------------------

@dataclass(frozen=True)
class Countermodel:
    """A finite membership valuation: points, memberships, element points."""
    points: Tuple[str, ...]
    membership: Dict[Tuple[str, str], bool]  # (point, set var) -> bool
    elements: Dict[str, str]                 # elem var -> point
    set_vars: Tuple[str, ...] = ()           # every set variable, even if empty

    def set_names(self) -> List[str]:
        return sorted(set(self.set_vars) | {s for (_p, s) in self.membership})

    def render(self) -> str:
        sets = self.set_names()
        lines = ["point | " + " ".join(sets) if sets else "point |"]
        for p in self.points:
            row = " ".join("x" if self.membership.get((p, s)) else "-" for s in sets)
            lines.append(f"{p:5} | {row}")
        for e, p in sorted(self.elements.items()):
            lines.append(f"{e} = {p}")
        if not self.points:
            lines.append("(empty universe)")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "points": list(self.points),
            "sets": {s: [bool(self.membership.get((p, s))) for p in self.points]
                     for s in self.set_names()},
            "elements": dict(self.elements),
        }


@dataclass(frozen=True)
class Valid:
    witnesses: Tuple[Tuple[str, SetTerm], ...] = ()

    kind = "valid"


@dataclass(frozen=True)
class Invalid:
    countermodel: Countermodel

    kind = "invalid"


@dataclass(frozen=True)
class Undecided:
    reason: str

    kind = "undecided"


Verdict = object  # Valid | Invalid | Undecided


@dataclass
class Obligation:
    premises: List[Formula]
    conclusion: Formula
    origin: int = -1
    verdict: Optional[Verdict] = None


# --- quantifier bookkeeping -------------------------------------------------------

def is_quantifier_free(f: Formula) -> bool:
    return not any(isinstance(g, QUANTIFIERS) for g in subformulas(f))


def _has_set_quantifier(f: Formula) -> bool:
    return any(isinstance(g, (ForallSet, ExistsSet)) for g in subformulas(f))


def count_inclusion_atoms(formulas: Sequence[Formula]) -> int:
    return sum(1 for f in formulas for g in subformulas(f)
               if isinstance(g, (Subset, SetEq)))


def _fresh(base: str, used: set) -> str:
    if base not in used:
        used.add(base)
        return base
    i = 1
    while f"{base}{i}" in used:
        i += 1
    used.add(f"{base}{i}")
    return f"{base}{i}"


def _all_names(formulas: Sequence[Formula]) -> set:
    names = set()
    for f in formulas:
        s, e = free_vars(f)
        names |= set(s) | set(e)
        for g in subformulas(f):
            if isinstance(g, QUANTIFIERS):
                names.add(g.var)
    return names


# --- region-model evaluation ------------------------------------------------------

class _RegionSpace:
    """Region arithmetic for a fixed ordered list of set variables."""

    def __init__(self, set_names: Sequence[str]):
        self.set_names = list(set_names)
        self.index = {n: i for i, n in enumerate(self.set_names)}
        self.n_regions = 1 << len(self.set_names)
        self.full = (1 << self.n_regions) - 1
        self._var_masks = {}
        for name, i in self.index.items():
            m = 0
            for r in range(self.n_regions):
                if (r >> i) & 1:
                    m |= 1 << r
            self._var_masks[name] = m

    def term_mask(self, t: SetTerm) -> int:
        if isinstance(t, SetVar):
            try:
                return self._var_masks[t.name]
            except KeyError:
                raise FragmentExceeded(f"unknown set variable {t.name!r}")
        if isinstance(t, EmptySet):
            return 0
        if isinstance(t, Union):
            return self.term_mask(t.left) | self.term_mask(t.right)
        if isinstance(t, Intersection):
            return self.term_mask(t.left) & self.term_mask(t.right)
        if isinstance(t, Complement):
            return self.full & ~self.term_mask(t.inner)
        raise TypeError(f"not a set term: {t!r}")

    def eval(self, f: Formula, inhabited: int, elems: Dict[str, int]) -> bool:
        """Truth over the region model; element quantifiers are exact."""
        if isinstance(f, Elem):
            try:
                r = elems[f.elem.name]
            except KeyError:
                raise FragmentExceeded(f"unknown element variable {f.elem.name!r}")
            return bool((self.term_mask(f.set) >> r) & 1)
        if isinstance(f, Subset):
            return inhabited & self.term_mask(f.left) & ~self.term_mask(f.right) == 0
        if isinstance(f, SetEq):
            return inhabited & (self.term_mask(f.left) ^ self.term_mask(f.right)) == 0
        if isinstance(f, Not):
            return not self.eval(f.body, inhabited, elems)
        if isinstance(f, And):
            return self.eval(f.left, inhabited, elems) and self.eval(f.right, inhabited, elems)
        if isinstance(f, Or):
            return self.eval(f.left, inhabited, elems) or self.eval(f.right, inhabited, elems)
        if isinstance(f, Implies):
            return (not self.eval(f.left, inhabited, elems)) or self.eval(f.right, inhabited, elems)
        if isinstance(f, Iff):
            return self.eval(f.left, inhabited, elems) == self.eval(f.right, inhabited, elems)
        if isinstance(f, Falsum):
            return False
        if isinstance(f, (ForallElem, ExistsElem)):
            regions = [r for r in range(self.n_regions) if (inhabited >> r) & 1]
            saved = elems.get(f.var)
            try:
                if isinstance(f, ForallElem):
                    for r in regions:
                        elems[f.var] = r
                        if not self.eval(f.body, inhabited, elems):
                            return False
                    return True
                for r in regions:
                    elems[f.var] = r
                    if self.eval(f.body, inhabited, elems):
                        return True
                return False
            finally:
                if saved is None:
                    elems.pop(f.var, None)
                else:
                    elems[f.var] = saved
        raise FragmentExceeded("set quantifier inside the matrix")


def _region_countermodel(space: _RegionSpace, generic: int,
                         elems: Dict[str, int]) -> Countermodel:
    points: List[str] = []
    membership: Dict[Tuple[str, str], bool] = {}
    elements: Dict[str, str] = {}
    region_point: Dict[int, str] = {}

    def add_point(region: int) -> str:
        name = f"p{len(points) + 1}"
        points.append(name)
        for s, i in space.index.items():
            membership[(name, s)] = bool((region >> i) & 1)
        return name

    for e in sorted(elems):
        r = elems[e]
        if r not in region_point:
            region_point[r] = add_point(r)
        elements[e] = region_point[r]
    for r in range(space.n_regions):
        if (generic >> r) & 1 and r not in region_point:
            region_point[r] = add_point(r)
    return Countermodel(tuple(points), membership, elements,
                        tuple(space.set_names))


def _search_region_countermodel(
        premises: Sequence[Formula], conclusion: Formula,
        set_names: Sequence[str], elem_names: Sequence[str],
        generic_cap: int) -> Optional[Tuple[_RegionSpace, int, Dict[str, int]]]:
    """Find a region model satisfying the premises and refuting the conclusion."""
    space = _RegionSpace(set_names)
    regions = range(space.n_regions)
    cap = min(space.n_regions, generic_cap)
    for size in range(cap + 1):
        for combo in itertools.combinations(regions, size):
            generic = 0
            for r in combo:
                generic |= 1 << r
            for assignment in itertools.product(regions, repeat=len(elem_names)):
                elems = dict(zip(elem_names, assignment))
                inhabited = generic
                for r in assignment:
                    inhabited |= 1 << r
                if all(space.eval(p, inhabited, elems) for p in premises) \
                        and not space.eval(conclusion, inhabited, elems):
                    return space, generic, elems
    return None


def _obligation_signature(premises: Sequence[Formula],
                          conclusion: Formula) -> Tuple[List[str], List[str], int]:
    set_names, elem_names, k = set(), set(), 0
    for f in (*premises, conclusion):
        s, e = free_vars(f)
        set_names |= set(s)
        elem_names |= set(e)
        for g in subformulas(f):
            if isinstance(g, (Subset, SetEq)):
                k += 1
    return sorted(set_names), sorted(elem_names), k


def decide_qf(ob: Obligation) -> Verdict:
    """Decide a quantifier-free obligation; Invalid carries a countermodel."""
    for f in (*ob.premises, ob.conclusion):
        if not is_quantifier_free(f):
            raise FragmentExceeded("decide_qf requires quantifier-free formulas")
    return _decide_flat(ob.premises, ob.conclusion)


# Upper bound on region models inspected per obligation. Oversized
# obligations drop premises unrelated to the conclusion first; if that
# is not enough they are reported as beyond the procedure's reach.
_WORK_BUDGET = 2_000_000


def _enumeration_work(n_sets: int, n_elems: int, k: int) -> int:
    import math
    regions = 1 << n_sets
    cap = min(regions, max(k, 1))
    combos = sum(math.comb(regions, size) for size in range(cap + 1))
    return combos * (regions ** n_elems)


def _relevant_premises(premises: Sequence[Formula],
                       conclusion: Formula) -> Tuple[List[Formula], List[Formula]]:
    """Premises sharing variables (transitively) with the conclusion.

    Variable-free premises are always kept (they cost nothing and may be
    inconsistent). Returns (kept, dropped)."""
    def names(f: Formula) -> frozenset:
        s, e = free_vars(f)
        return s | frozenset("e:" + n for n in e)

    seed = set(names(conclusion))
    pool = [(p, names(p)) for p in premises]
    kept, rest = [], pool
    changed = True
    while changed:
        changed = False
        still = []
        for p, ns in rest:
            if not ns or ns & seed:
                kept.append(p)
                seed |= ns
                changed = True
            else:
                still.append((p, ns))
        rest = still
    order = {id(p): i for i, p in enumerate(premises)}
    kept.sort(key=lambda p: order[id(p)])
    return kept, [p for p, _ns in rest]


def _decide_flat(premises: Sequence[Formula], conclusion: Formula) -> Verdict:
    """Decide formulas that are region-evaluable (QF or element-quantified)."""
    premises = list(premises)
    dropped: List[Formula] = []
    set_names, elem_names, k = _obligation_signature(premises, conclusion)
    if _enumeration_work(len(set_names), len(elem_names), k) > _WORK_BUDGET:
        premises, dropped = _relevant_premises(premises, conclusion)
        set_names, elem_names, k = _obligation_signature(premises, conclusion)
        if _enumeration_work(len(set_names), len(elem_names), k) > _WORK_BUDGET:
            raise FragmentExceeded(
                "too many variables in scope to decide this step")
    found = _search_region_countermodel(premises, conclusion, set_names,
                                        elem_names, generic_cap=max(k, 1))
    if found is None:
        return Valid()
    space, generic, elems = found
    countermodel = _region_countermodel(space, generic, elems)
    if dropped and not _countermodel_satisfies(countermodel, dropped):
        # refuting only part of the facts in scope proves nothing
        return Undecided("could not check the step against every fact in scope")
    return Invalid(countermodel)


# --- quantified conclusions and premises ------------------------------------------

_WITNESS_DEPTH = 2
_WITNESS_SETS = 4        # witness terms draw on at most this many sets
_WITNESS_CANDIDATES = 160
_WITNESS_ATTEMPTS = 4096


def _witness_candidates(set_names: Sequence[str]) -> List[SetTerm]:
    """Boolean terms of depth <= 2 over the in-scope sets and the empty set.

    Candidates are deduplicated semantically (by region mask over the
    in-scope variables), so the search tries each distinct Boolean
    combination once, simplest spelling first. The search is a bounded
    heuristic — failure means Undecided, so hard caps are safe.
    """
    set_names = list(set_names)[:_WITNESS_SETS]
    space = _RegionSpace(set_names)
    base: List[SetTerm] = [EmptySet()] + [SetVar(n) for n in set_names]
    seen_masks = set()
    out: List[SetTerm] = []

    def offer(t: SetTerm) -> bool:
        m = space.term_mask(t)
        if m not in seen_masks:
            seen_masks.add(m)
            out.append(t)
        return len(out) < _WITNESS_CANDIDATES

    for t in base:
        if not offer(t):
            return out
    for _ in range(_WITNESS_DEPTH):
        prev = list(out)
        for t in prev:
            if not offer(Complement(t)):
                return out
        for a in prev:
            for b in prev:
                if not (offer(Union(a, b)) and offer(Intersection(a, b))):
                    return out
    return out


def _flatten_premise(p: Formula, used: set, set_names: Sequence[str]) -> Tuple[List[Formula], bool]:
    """Rewrite a premise into region-evaluable formulas.

    Top-level existentials are skolemized with fresh variables; element
    universals stay (the region evaluator handles them). Returns the
    formulas plus a flag saying the premise was weakened or dropped.
    """
    g = p
    while True:
        if isinstance(g, ExistsSet):
            g = subst_set(g.body, g.var, SetVar(_fresh(g.var, used)))
        elif isinstance(g, ExistsElem):
            g = subst_elem(g.body, g.var, ElemVar(_fresh(g.var, used)))
        else:
            break
    if not _has_set_quantifier(g):
        return [g], False
    if isinstance(g, ForallSet):
        # Sound but incomplete: instantiate at in-scope set variables and
        # the empty set. Invalid verdicts get re-checked against the
        # original premises.
        flat = []
        for t in [EmptySet()] + [SetVar(n) for n in set_names]:
            try:
                inst = subst_set(g.body, g.var, t)
            except ValueError:
                continue
            if not _has_set_quantifier(inst):
                flat.append(inst)
        return flat, True
    return [], True


def decide_quantified(ob: Obligation) -> Verdict:
    """Decide an obligation whose conclusion is quantified (prenex-like).

    Universal set/element quantifiers are stripped with fresh variables;
    existential set blocks are attempted by witness search, existential
    element conclusions are decided over region models. Search failure is
    Undecided, never Invalid.
    """
    used = _all_names([*ob.premises, ob.conclusion])
    set_names, _elems, _k = _obligation_signature(ob.premises, ob.conclusion)
    flat_premises: List[Formula] = []
    approx = False
    for p in ob.premises:
        flat, weakened = _flatten_premise(p, used, set_names)
        flat_premises.extend(flat)
        approx = approx or weakened

    conclusion = ob.conclusion
    while True:
        if isinstance(conclusion, Not) and isinstance(conclusion.body, QUANTIFIERS):
            inner = conclusion.body
            flip = {ForallSet: ExistsSet, ExistsSet: ForallSet,
                    ForallElem: ExistsElem, ExistsElem: ForallElem}[type(inner)]
            conclusion = flip(inner.var, Not(inner.body))
            continue
        if isinstance(conclusion, ForallSet):
            conclusion = subst_set(conclusion.body, conclusion.var,
                                   SetVar(_fresh(conclusion.var, used)))
            continue
        if isinstance(conclusion, ForallElem):
            conclusion = subst_elem(conclusion.body, conclusion.var,
                                    ElemVar(_fresh(conclusion.var, used)))
            continue
        break

    if isinstance(conclusion, ExistsSet):
        return _decide_exists_set(flat_premises, conclusion, used, ob, approx)

    if _has_set_quantifier(conclusion):
        raise FragmentExceeded("set quantifier inside the matrix")

    try:
        verdict = _decide_flat(flat_premises, conclusion)
    except FragmentExceeded:
        return Undecided("beyond the decided fragment")
    if isinstance(verdict, Invalid):
        if isinstance(conclusion, ExistsElem):
            return Undecided("no witness found")
        if approx and not _countermodel_satisfies(verdict.countermodel, ob.premises):
            return Undecided("quantified premises beyond the decided fragment")
    return verdict


def _decide_exists_set(premises: List[Formula], conclusion: Formula,
                       used: set, ob: Obligation, approx: bool) -> Verdict:
    block: List[str] = []
    matrix = conclusion
    while isinstance(matrix, ExistsSet):
        block.append(matrix.var)
        matrix = matrix.body
    if _has_set_quantifier(matrix):
        raise FragmentExceeded("set quantifier inside the matrix")

    # Inconsistent premises validate anything; check before searching.
    try:
        if isinstance(_decide_flat(premises, Falsum()), Valid):
            return Valid()
    except FragmentExceeded:
        pass

    set_names = sorted(n for n in {nm for f in (*premises, conclusion)
                                   for nm in free_vars(f)[0]})
    candidates = _witness_candidates(set_names)
    attempts = 0
    for combo in itertools.product(candidates, repeat=len(block)):
        attempts += 1
        if attempts > _WITNESS_ATTEMPTS:
            break
        inst = matrix
        try:
            for v, t in zip(block, combo):
                inst = subst_set(inst, v, t)
        except ValueError:
            continue
        s, e = free_vars(inst)
        if any(v in s or v in e for v in block):
            # The bound name survives at the other sort; substituting only
            # the set occurrences would change what the sentence says.
            continue
        try:
            verdict = _decide_flat(premises, inst)
        except FragmentExceeded:
            continue
        if isinstance(verdict, Valid):
            return Valid(witnesses=tuple(zip(block, combo)))
    return Undecided("no witness found")


def decide(ob: Obligation) -> Verdict:
    """Decide an obligation, mapping fragment overruns to Undecided."""
    try:
        if all(is_quantifier_free(f) for f in (*ob.premises, ob.conclusion)):
            return decide_qf(ob)
        return decide_quantified(ob)
    except FragmentExceeded as exc:
        return Undecided(str(exc))


# --- concrete finite models (the oracle side) -------------------------------------

def _compile_term(t: SetTerm):
    if isinstance(t, SetVar):
        name = t.name
        return lambda n, se, el: se[name]
    if isinstance(t, EmptySet):
        return lambda n, se, el: 0
    if isinstance(t, Union):
        a, b = _compile_term(t.left), _compile_term(t.right)
        return lambda n, se, el: a(n, se, el) | b(n, se, el)
    if isinstance(t, Intersection):
        a, b = _compile_term(t.left), _compile_term(t.right)
        return lambda n, se, el: a(n, se, el) & b(n, se, el)
    if isinstance(t, Complement):
        a = _compile_term(t.inner)
        return lambda n, se, el: ((1 << n) - 1) & ~a(n, se, el)
    raise TypeError(f"not a set term: {t!r}")


def compile_formula(f: Formula):
    """Compile to a closure over (universe size, set masks, element points)."""
    if isinstance(f, Elem):
        name, tm = f.elem.name, _compile_term(f.set)
        return lambda n, se, el: bool((tm(n, se, el) >> el[name]) & 1)
    if isinstance(f, Subset):
        a, b = _compile_term(f.left), _compile_term(f.right)
        return lambda n, se, el: a(n, se, el) & ~b(n, se, el) == 0
    if isinstance(f, SetEq):
        a, b = _compile_term(f.left), _compile_term(f.right)
        return lambda n, se, el: a(n, se, el) == b(n, se, el)
    if isinstance(f, Not):
        a = compile_formula(f.body)
        return lambda n, se, el: not a(n, se, el)
    if isinstance(f, And):
        a, b = compile_formula(f.left), compile_formula(f.right)
        return lambda n, se, el: a(n, se, el) and b(n, se, el)
    if isinstance(f, Or):
        a, b = compile_formula(f.left), compile_formula(f.right)
        return lambda n, se, el: a(n, se, el) or b(n, se, el)
    if isinstance(f, Implies):
        a, b = compile_formula(f.left), compile_formula(f.right)
        return lambda n, se, el: (not a(n, se, el)) or b(n, se, el)
    if isinstance(f, Iff):
        a, b = compile_formula(f.left), compile_formula(f.right)
        return lambda n, se, el: a(n, se, el) == b(n, se, el)
    if isinstance(f, Falsum):
        return lambda n, se, el: False
    if isinstance(f, (ForallSet, ExistsSet)):
        v, body = f.var, compile_formula(f.body)
        forall = isinstance(f, ForallSet)

        def qset(n, se, el):
            saved = se.get(v)
            try:
                for m in range(1 << n):
                    se[v] = m
                    if body(n, se, el) != forall:
                        return not forall
                return forall
            finally:
                if saved is None:
                    se.pop(v, None)
                else:
                    se[v] = saved

        return qset
    if isinstance(f, (ForallElem, ExistsElem)):
        v, body = f.var, compile_formula(f.body)
        forall = isinstance(f, ForallElem)

        def qelem(n, se, el):
            saved = el.get(v)
            try:
                for p in range(n):
                    el[v] = p
                    if body(n, se, el) != forall:
                        return not forall
                return forall
            finally:
                if saved is None:
                    el.pop(v, None)
                else:
                    el[v] = saved

        return qelem
    raise TypeError(f"not a formula: {f!r}")


def _concrete_countermodel(set_names, elem_names, n, se, el) -> Countermodel:
    points = tuple(f"p{i + 1}" for i in range(n))
    membership = {(points[p], s): bool((se[s] >> p) & 1)
                  for s in set_names for p in range(n)}
    elements = {e: points[el[e]] for e in elem_names}
    return Countermodel(points, membership, elements, tuple(set_names))


def brute_force_oracle(ob: Obligation, max_universe: int = 3) -> Verdict:
    """Enumerate every universe up to the bound; first countermodel wins."""
    set_names, elem_names, _k = _obligation_signature(ob.premises, ob.conclusion)
    compiled_premises = [compile_formula(p) for p in ob.premises]
    compiled_conclusion = compile_formula(ob.conclusion)
    for n in range(0, max_universe + 1):
        if elem_names and n == 0:
            continue
        for masks in itertools.product(range(1 << n), repeat=len(set_names)):
            se = dict(zip(set_names, masks))
            for pts in itertools.product(range(n), repeat=len(elem_names)):
                el = dict(zip(elem_names, pts))
                if all(p(n, se, el) for p in compiled_premises) \
                        and not compiled_conclusion(n, se, el):
                    return Invalid(_concrete_countermodel(
                        set_names, elem_names, n, se, el))
    return Valid()


def _countermodel_satisfies(cm: Countermodel, premises: Sequence[Formula]) -> bool:
    """Evaluate the premises over the countermodel, quantifiers included."""
    n = len(cm.points)
    index = {p: i for i, p in enumerate(cm.points)}
    set_names = cm.set_names()
    se = {s: 0 for s in set_names}
    for (p, s), member in cm.membership.items():
        if member:
            se[s] |= 1 << index[p]
    el = {e: index[p] for e, p in cm.elements.items()}
    try:
        return all(compile_formula(f)(n, dict(se), dict(el)) for f in premises)
    except KeyError:
        return False
