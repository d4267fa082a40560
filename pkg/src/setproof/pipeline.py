"""End-to-end checking: text in, CheckReport out."""
from __future__ import annotations

from typing import Dict, List, Optional

from .atp import Invalid as AtpInvalid, Undecided
from .feedback import CheckReport, assemble
from .frontend import DocumentResult, formalize_document
from .malrules import MalRule, diagnose, load_library
from .proof import check_records

_LIBRARY: Optional[List[MalRule]] = None


def mal_rule_library() -> List[MalRule]:
    global _LIBRARY
    if _LIBRARY is None:
        _LIBRARY = load_library()
    return _LIBRARY


def check_document(doc: DocumentResult,
                   library: Optional[List[MalRule]] = None) -> CheckReport:
    """Structure, decide and diagnose an already-formalized document."""
    state = check_records(doc.records())
    lib = library if library is not None else mal_rule_library()
    diagnoses: Dict[int, list] = {}
    for ob in state.obligations:
        if isinstance(ob.verdict, (AtpInvalid, Undecided)):
            found = diagnose(ob, lib)
            if found:
                diagnoses[ob.origin] = found
    return assemble(doc, state, diagnoses)


def check_text(text: str,
               library: Optional[List[MalRule]] = None) -> CheckReport:
    """Check a document with the rule-based formalization backend."""
    return check_document(formalize_document(text), library)
