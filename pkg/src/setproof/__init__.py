"""setproof: a didactical proof checker for elementary Boolean set theory.

Proofs are written in a controlled English; each sentence is formalized
(rule-based by default, optionally via a language model), folded into a
scoped proof structure, and every claim is decided by a complete decision
procedure for the quantifier-free fragment. Failed steps are matched
against a library of classic fallacies for targeted feedback.
"""
from .atp import (
    Countermodel, FragmentExceeded, Invalid as InvalidVerdict, Obligation,
    Undecided, Valid, brute_force_oracle, decide, decide_qf, decide_quantified,
)
from .context import ContextView, MissingContextError
from .feedback import CheckReport, FeedbackItem, assemble, report_json
from .formula import (
    And, Complement, Elem, ElemVar, EmptySet, ExistsElem, ExistsSet, Falsum,
    ForallElem, ForallSet, Formula, Iff, Implies, Intersection, Not, Or,
    SetEq, SetTerm, SetVar, SortError, Subset, Union, alpha_eq, free_vars,
    sort_check,
)
from .frontend import DocumentResult, formalize_document
from .grammar import parse_sentence
from .listformat import (
    ListFormat, MalformedList, formula_from_string, formula_to_string,
    from_list_format, parse_list_string, print_list, to_list_format,
)
from .llm import (
    HttpTransport, MockTransport, PromptConfig, TransportError,
    build_completion_prompt, llm_formalize_document, parse_model_output,
)
from .malrules import (
    Diagnosis, MalRule, SelfCheckFailure, diagnose, load_library,
    mal_rule_selfcheck,
)
from .pipeline import check_document, check_text
from .proof import ProofState, check_records
from .records import (
    Annotation, Assumption, Claim, Declaration, DeclarationPayload,
    GoalAnnouncement, Invalid, MissingContext, Ok, SentenceRecord,
)
from .segment import segment

__version__ = "0.1.0"
