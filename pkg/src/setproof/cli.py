"""Command line interface: check a proof, score a corpus, run the service.

Exit codes: 0 accepted, 1 accepted with warnings, 2 rejected (or corpus
mismatches), 3 I/O or transport trouble.
"""
from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from typing import Callable, Optional, Tuple

from .context import EMPTY_CONTEXT
from .corpus import (
    CorpusFormatError, load_corpus, load_shipped_corpus, score_corpus,
)
from .feedback import report_json
from .frontend import formalize_document
from .grammar import parse_sentence
from .llm import (
    HttpTransport, MockTransport, PromptConfig, TransportError,
    UnparseableModelOutput, build_request, llm_formalize_document,
    parse_model_output,
)
from .pipeline import check_document
from .records import Invalid

EXIT_OK = 0
EXIT_WARNINGS = 1
EXIT_REJECTED = 2
EXIT_TROUBLE = 3


def default_prompt_config() -> PromptConfig:
    block = resources.files("setproof.data").joinpath("example_block.txt") \
        .read_text("utf-8")
    return PromptConfig(mode="completion", example_block=block)


def _parse_backend(spec: str) -> Tuple[str, Optional[str]]:
    if spec == "rule" or spec == "llm":
        return spec, None
    if spec.startswith("llm-mock="):
        return "llm-mock", spec[len("llm-mock="):]
    raise argparse.ArgumentTypeError(
        f"backend must be rule, llm or llm-mock=<path>, not {spec!r}")


def _make_transport(kind: str, mock_path: Optional[str]):
    if kind == "llm":
        return HttpTransport()
    return MockTransport.from_file(mock_path)


def _formalize(text: str, backend: str, mock_path: Optional[str]):
    if backend == "rule":
        return formalize_document(text)
    cfg = default_prompt_config()
    transport = _make_transport(backend, mock_path)
    return llm_formalize_document(text, cfg, transport)


def cmd_check(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TROUBLE
    backend, mock_path = args.backend
    try:
        doc = _formalize(text, backend, mock_path)
    except (TransportError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TROUBLE
    report = check_document(doc)
    if args.json:
        print(report_json(report))
    else:
        print(report.render_text())
    if doc.transport_error:
        return EXIT_TROUBLE
    return {"Accepted": EXIT_OK,
            "AcceptedWithWarnings": EXIT_WARNINGS,
            "Rejected": EXIT_REJECTED}[report.verdict]


def _corpus_backend(backend: str, mock_path: Optional[str]) -> Callable:
    if backend == "rule":
        return lambda raw: parse_sentence(raw, EMPTY_CONTEXT)
    cfg = default_prompt_config()
    transport = _make_transport(backend, mock_path)

    def run(raw: str):
        try:
            response = transport.send(build_request([], raw, cfg))
            return parse_model_output(response, cfg)
        except (TransportError, UnparseableModelOutput) as exc:
            return Invalid(str(exc))

    return run


def cmd_corpus(args) -> int:
    try:
        entries = load_corpus(args.path) if args.path else load_shipped_corpus()
    except (OSError, CorpusFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TROUBLE
    backend, mock_path = args.backend
    try:
        run = _corpus_backend(backend, mock_path)
    except (TransportError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TROUBLE
    results = score_corpus(entries, run)
    for i, r in enumerate(results, start=1):
        mark = "+" if r.passed else "-"
        print(f"{mark} {i:2d} {r.entry.sentence}")
        if not r.passed:
            print(f"     expected {r.entry.kind}  {r.entry.formalization}")
            print(f"     got      {r.got_kind}  {r.got_formalization} {r.detail}")
    good = sum(r.passed for r in results)
    rate = 100.0 * good / len(results) if results else 0.0
    print(f"score: {good}/{len(results)} ({rate:.0f} percent)")
    return EXIT_OK if good == len(results) else EXIT_REJECTED


def cmd_serve(args) -> int:
    from .service import serve
    backend, mock_path = args.backend
    try:
        serve(port=args.port, default_backend=backend, mock_path=mock_path)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TROUBLE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="setproof",
        description="Check Boolean set theory proofs written in a "
                    "controlled English")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="check one proof text")
    p_check.add_argument("file")
    p_check.add_argument("--backend", type=_parse_backend,
                         default=("rule", None),
                         help="rule (default), llm, or llm-mock=<path>")
    p_check.add_argument("--json", action="store_true",
                         help="emit the structured report")
    p_check.set_defaults(func=cmd_check)

    p_corpus = sub.add_parser("corpus", help="score a golden corpus")
    p_corpus.add_argument("path", nargs="?", default=None,
                          help="corpus file (default: the shipped corpus)")
    p_corpus.add_argument("--backend", type=_parse_backend,
                          default=("rule", None))
    p_corpus.set_defaults(func=cmd_corpus)

    p_serve = sub.add_parser("serve", help="run the HTTP checking service")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--backend", type=_parse_backend,
                         default=("rule", None))
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
