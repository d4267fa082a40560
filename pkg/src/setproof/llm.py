"""Language-model formalization backend.

Reproduces the prompt protocol of the rule backend's LLM alternative: a
completion prompt carries an example block, then one line of the form
``context:{<prior sentences>} <sentence> # `` — the request stops at the
stop symbol ``§``. The assistant flavour sends a system prompt plus the
same context line as the user message and expects a
``[type, subtype, formalization]`` triple back.

The transport is abstract; tests use ``MockTransport`` (canned responses
keyed by the exact prompt, call log included), production uses
``HttpTransport`` (endpoint and token from DIPROCHE_LLM_URL /
DIPROCHE_LLM_TOKEN). Model output is trimmed, normalized (``union`` for
``cup`` and friends), parsed and sort-checked into ordinary sentence
records, so the rest of the pipeline cannot tell the backends apart.
"""
from __future__ import annotations

import json
import os
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

from .formula import Formula, SortError, sort_check
from .grammar import _P, ParseFail, tokenize
from .listformat import (
    ListFormat, MalformedList, from_list_format, parse_list_string,
)
from .records import (
    Annotation, Assumption, Claim, Declaration, DeclarationPayload,
    GoalAnnouncement, Invalid, MissingContext, Ok, ParseOutcome,
    SORT_ELEMENT, SORT_SET, make_record,
)
from .frontend import DocumentResult
from .segment import segment

ENV_URL = "DIPROCHE_LLM_URL"
ENV_TOKEN = "DIPROCHE_LLM_TOKEN"

# Words-to-token estimate factor and budget for the example block.
_PROMPT_BUDGET_TOKENS = 3500
_TOKENS_PER_WORD = 1.3


class UnparseableModelOutput(Exception):
    def __init__(self, raw: str, why: str):
        super().__init__(f"{why}: {raw!r}")
        self.raw = raw
        self.why = why


class TransportError(Exception):
    pass


@dataclass(frozen=True)
class PromptConfig:
    mode: str = "completion"            # completion | assistant
    example_block: str = ""
    system_prompt: str = ""
    stop_symbol: str = "§"
    separator: str = "#"
    max_context_sentences: int = 64

    def __post_init__(self):
        if self.mode not in ("completion", "assistant"):
            raise ValueError(f"unknown mode {self.mode!r}")
        for name, ch in (("stop_symbol", self.stop_symbol),
                         ("separator", self.separator)):
            if len(ch) != 1:
                raise ValueError(f"{name} must be a single character")
            if ch in self.example_block:
                # the separator/stop pair structures each example line, but
                # must never occur inside the example sentences themselves;
                # lines of the block may end with "# <triple>§"
                for line in self.example_block.splitlines():
                    payload = line.split(self.separator)[0]
                    if ch in payload:
                        raise ValueError(
                            f"{name} {ch!r} occurs in an example sentence")
        words = len(self.example_block.split())
        if words * _TOKENS_PER_WORD > _PROMPT_BUDGET_TOKENS:
            raise ValueError("example block exceeds the prompt budget")


@dataclass(frozen=True)
class TransportRequest:
    prompt: Optional[str] = None
    messages: Optional[tuple] = None
    stop: tuple = ()

    def key(self) -> str:
        if self.prompt is not None:
            return self.prompt
        return json.dumps(list(self.messages), sort_keys=True)


@dataclass
class MockTransport:
    """Canned transport: exact prompt string -> canned response."""
    mapping: Dict[str, str] = field(default_factory=dict)
    log: List[dict] = field(default_factory=list)

    @classmethod
    def from_file(cls, path: str) -> "MockTransport":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def send(self, request: TransportRequest) -> str:
        key = request.key()
        try:
            response = self.mapping[key]
        except KeyError:
            raise TransportError(f"mock has no response for prompt {key!r}")
        self.log.append({"prompt": key, "response": response})
        return response

    def save_log(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.log, fh, indent=2)


@dataclass
class HttpTransport:
    """JSON-over-HTTPS completion endpoint; fails fast, retries once."""
    url: Optional[str] = None
    token: Optional[str] = None
    timeout: float = 30.0
    retries: int = 1

    def __post_init__(self):
        self.url = self.url or os.environ.get(ENV_URL)
        self.token = self.token or os.environ.get(ENV_TOKEN)
        if not self.url or not self.token:
            raise TransportError(
                f"the live backend needs {ENV_URL} and {ENV_TOKEN} set")

    def send(self, request: TransportRequest) -> str:
        body = {"stop": list(request.stop)}
        if request.prompt is not None:
            body["prompt"] = request.prompt
        else:
            body["messages"] = list(request.messages)
        data = json.dumps(body).encode("utf-8")
        last_error: Optional[Exception] = None
        for attempt in range(self.retries + 1):
            try:
                req = urllib.request.Request(
                    self.url, data=data,
                    headers={"Content-Type": "application/json",
                             "Authorization": f"Bearer {self.token}"})
                with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                    return _extract_text(resp.read().decode("utf-8"))
            except (urllib.error.URLError, OSError, ValueError) as exc:
                last_error = exc
                if attempt < self.retries:
                    time.sleep(0.5)
        raise TransportError(f"transport failed: {last_error}")


def _extract_text(body: str) -> str:
    try:
        payload = json.loads(body)
    except json.JSONDecodeError:
        return body
    if isinstance(payload, dict):
        for key in ("text", "completion", "output"):
            if isinstance(payload.get(key), str):
                return payload[key]
        choices = payload.get("choices")
        if isinstance(choices, list) and choices:
            first = choices[0]
            if isinstance(first.get("text"), str):
                return first["text"]
            message = first.get("message", {})
            if isinstance(message.get("content"), str):
                return message["content"]
    return body


# --- prompts -------------------------------------------------------------------

def build_completion_prompt(ctx: Sequence[str], sentence: str,
                            cfg: PromptConfig) -> str:
    if len(ctx) > cfg.max_context_sentences:
        raise ValueError("context exceeds max_context_sentences")
    return (f"{cfg.example_block}context:{{{' '.join(ctx)}}} "
            f"{sentence} {cfg.separator} ")


def build_request(ctx: Sequence[str], sentence: str,
                  cfg: PromptConfig) -> TransportRequest:
    if cfg.mode == "completion":
        return TransportRequest(prompt=build_completion_prompt(ctx, sentence, cfg),
                                stop=(cfg.stop_symbol,))
    user = f"context:{{{' '.join(ctx)}}} {sentence}"
    return TransportRequest(messages=(
        {"role": "system", "content": cfg.system_prompt},
        {"role": "user", "content": user},
    ), stop=(cfg.stop_symbol,))


# --- output normalization and parsing --------------------------------------------

# Applying the table twice is the same as applying it once: no target is
# ever a source. The sort word "element" of declaration pairs must NOT be
# in this table — it is a keyword of the triple format, not a connective.
NORMALIZATION_TABLE = (
    ("union", "cup"),
    ("intersection", "cap"),
    ("complement", "comp"),
    ("subset", "subseteq"),
)
_NORMALIZE = dict(NORMALIZATION_TABLE)


def normalize_tree(tree: ListFormat) -> ListFormat:
    if isinstance(tree, str):
        return _NORMALIZE.get(tree, tree)
    return [normalize_tree(t) for t in tree]


_KIND_WORDS = {
    "beh": Claim(), "claim": Claim(),
    "ang": Assumption(), "assumption": Assumption(),
    "ziel": GoalAnnouncement(), "goal": GoalAnnouncement(),
    "goal declaration": GoalAnnouncement(),
    "note": Annotation("other"), "annotation": Annotation("other"),
}
_DECL_WORDS = {"decl", "declaration", "variable declaration"}
_ASSMPT_SUBTYPES = {"assmpt", "with additional assumption", "with assumption"}


def parse_model_output(raw: str, cfg: PromptConfig,
                       index: int = 0) -> ParseOutcome:
    """Trim, recognize the error words, decode the triple, normalize."""
    text = raw.split(cfg.stop_symbol)[0].strip()
    lowered = text.lower().rstrip(".")
    if lowered == "invalid":
        return Invalid("the model judged the sentence invalid")
    if lowered == "missing context":
        return MissingContext()
    if not text.startswith("["):
        raise UnparseableModelOutput(raw, "expected a bracketed triple")
    if cfg.mode == "completion":
        return _decode_internal_triple(text, raw, index)
    return _decode_assistant_triple(text, raw, index)


def _decode_internal_triple(text: str, raw: str, index: int) -> ParseOutcome:
    try:
        tree = normalize_tree(parse_list_string(text))
    except MalformedList as exc:
        raise UnparseableModelOutput(raw, str(exc))
    if not (isinstance(tree, list) and len(tree) == 3 and isinstance(tree[1], str)):
        raise UnparseableModelOutput(raw, "expected [vars,type,content]")
    _vars, tag, content = tree
    kind = _KIND_WORDS.get(tag)
    if tag in _DECL_WORDS:
        return _decl_record(content, raw, index)
    if kind is None:
        raise UnparseableModelOutput(raw, f"unknown sentence type {tag!r}")
    if isinstance(kind, Annotation):
        return Ok(make_record(index, raw, kind, None))
    formula = _content_formula(content, raw)
    return Ok(make_record(index, raw, kind, formula))


def _decode_assistant_triple(text: str, raw: str, index: int) -> ParseOutcome:
    parts = _split_triple(text, raw)
    if len(parts) != 3:
        raise UnparseableModelOutput(raw, "expected [type,subtype,formalization]")
    kind_word, subtype, formalization = (p.strip() for p in parts)
    kind_key = kind_word.lower()
    if kind_key in _DECL_WORDS:
        with_assumption = subtype.lower() in _ASSMPT_SUBTYPES
        payload = _assistant_declaration(formalization, raw, with_assumption)
        return Ok(make_record(index, raw,
                              Declaration(with_assumption=with_assumption),
                              payload))
    kind = _KIND_WORDS.get(kind_key)
    if kind is None:
        raise UnparseableModelOutput(raw, f"unknown sentence type {kind_word!r}")
    formula = _math_text_formula(formalization, raw)
    return Ok(make_record(index, raw, kind, formula))


def _split_triple(text: str, raw: str) -> List[str]:
    if not (text.startswith("[") and text.endswith("]")):
        raise UnparseableModelOutput(raw, "expected a bracketed triple")
    inner = text[1:-1]
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(inner):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        elif ch == "," and depth == 0 and len(parts) < 2:
            parts.append(inner[start:i])
            start = i + 1
    parts.append(inner[start:])
    return parts


def _content_formula(content: ListFormat, raw: str) -> Formula:
    try:
        formula = from_list_format(content)
        sort_check(formula)
        return formula
    except MalformedList as exc:
        raise UnparseableModelOutput(
            raw, f"content is outside Boolean set theory ({exc})")
    except SortError as exc:
        raise UnparseableModelOutput(raw, f"ill-sorted content ({exc})")


def _math_text_formula(text: str, raw: str) -> Formula:
    normalized = " ".join(_NORMALIZE.get(w, w) for w in text.split())
    try:
        from .context import EMPTY_CONTEXT
        p = _P(tokenize(normalized), EMPTY_CONTEXT)
        formula = p.math_formula()
        if not p.done():
            raise ParseFail("trailing input in formalization")
        sort_check(formula)
        return formula
    except (ParseFail, SortError) as exc:
        raise UnparseableModelOutput(raw, f"cannot read formalization ({exc})")


def _decl_record(content: ListFormat, raw: str, index: int) -> ParseOutcome:
    if not isinstance(content, list):
        raise UnparseableModelOutput(raw, "declaration content must be a list")
    if content and isinstance(content[0], list) and content[0] \
            and isinstance(content[0][0], list):
        decl_part, assumption_part = content[0], content[1]
        assumption = _content_formula(assumption_part, raw)
    else:
        decl_part, assumption = content, None
    decls = []
    for pair in decl_part:
        if not (isinstance(pair, list) and len(pair) == 2
                and isinstance(pair[0], str)):
            raise UnparseableModelOutput(raw, "bad declaration pair")
        sort = SORT_ELEMENT if pair[1] == "element" else SORT_SET
        decls.append((pair[0], sort))
    payload = DeclarationPayload(tuple(decls), assumption)
    kind = Declaration(with_assumption=assumption is not None)
    return Ok(make_record(index, raw, kind, payload))


def _assistant_declaration(text: str, raw: str,
                           with_assumption: bool) -> DeclarationPayload:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise UnparseableModelOutput(raw, "expected a declaration list")
    if not with_assumption:
        tree = _tolerant_tree(text, raw)
        return _pairs_payload(tree, None, raw)
    inner = text[1:-1]
    depth, split_at = 0, None
    for i, ch in enumerate(inner):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        elif ch == "," and depth == 0:
            split_at = i
            break
    if split_at is None:
        raise UnparseableModelOutput(raw, "expected [declarations, assumption]")
    decl_tree = _tolerant_tree(inner[:split_at].strip(), raw)
    assumption = _math_text_formula(inner[split_at + 1:].strip(), raw)
    return _pairs_payload(decl_tree, assumption, raw)


def _pairs_payload(tree, assumption, raw) -> DeclarationPayload:
    decls = []
    for pair in tree:
        if not (isinstance(pair, list) and len(pair) == 2):
            raise UnparseableModelOutput(raw, "bad declaration pair")
        name, sort_word = pair[0].strip(), pair[1].strip()
        sort = SORT_ELEMENT if sort_word == "element" else SORT_SET
        decls.append((name, sort))
    return DeclarationPayload(tuple(decls), assumption)


def _tolerant_tree(text: str, raw: str):
    """Bracketed tree whose leaves are raw text runs (assistant output)."""
    pos = 0

    def item():
        nonlocal pos
        while pos < len(text) and text[pos] == " ":
            pos += 1
        if pos < len(text) and text[pos] == "[":
            pos += 1
            items = []
            while True:
                items.append(item())
                while pos < len(text) and text[pos] == " ":
                    pos += 1
                if pos < len(text) and text[pos] == ",":
                    pos += 1
                    continue
                if pos < len(text) and text[pos] == "]":
                    pos += 1
                    return items
                raise UnparseableModelOutput(raw, "unbalanced brackets")
        start = pos
        while pos < len(text) and text[pos] not in ",[]":
            pos += 1
        return text[start:pos].strip()

    out = item()
    if text[pos:].strip():
        raise UnparseableModelOutput(raw, "trailing text after the triple")
    return out


# --- the document loop --------------------------------------------------------------

def llm_formalize_document(text: str, cfg: PromptConfig,
                           transport) -> DocumentResult:
    """Same minimal-context loop as the rule backend, one transport call
    per attempt; a transport failure aborts the rest of the document."""
    segments, issues = segment(text)
    outcomes: List[ParseOutcome] = []
    context_used: List[int] = []
    raws = [seg.raw for seg in segments]
    for i in range(len(segments)):
        outcome: ParseOutcome = MissingContext()
        used = 0
        for k in range(0, min(i, cfg.max_context_sentences) + 1):
            request = build_request(raws[i - k:i], raws[i], cfg)
            try:
                response = transport.send(request)
            except TransportError:
                return DocumentResult(
                    segments, outcomes, context_used, issues,
                    transport_error="formalization service unavailable")
            try:
                outcome = parse_model_output(response, cfg, index=i)
            except UnparseableModelOutput as exc:
                outcome = Invalid(f"unusable model output ({exc.why})")
                break
            used = k
            if not isinstance(outcome, MissingContext):
                break
        if isinstance(outcome, Ok) and used > 0:
            outcome = Ok(replace(outcome.record, needs_context=True))
        outcomes.append(outcome)
        context_used.append(used)
    return DocumentResult(segments, outcomes, context_used, issues)
