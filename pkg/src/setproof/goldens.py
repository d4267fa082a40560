"""Access to the shipped proof texts: three correct proofs and their
single-sentence mutations, each annotated with the sentence to blame."""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import List


@dataclass(frozen=True)
class GoldenText:
    name: str
    text: str


@dataclass(frozen=True)
class Mutation:
    name: str
    text: str
    blamed_index: int
    expected_code: str


def _proofs_dir():
    return resources.files("setproof.data").joinpath("proofs")


def golden_texts() -> List[GoldenText]:
    out = []
    for entry in sorted(_proofs_dir().iterdir(), key=lambda e: e.name):
        if entry.name.startswith("golden_") and entry.name.endswith(".txt"):
            out.append(GoldenText(entry.name, entry.read_text("utf-8")))
    return out


def mutations() -> List[Mutation]:
    manifest = _proofs_dir().joinpath("mutations.txt").read_text("utf-8")
    out = []
    for line in manifest.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, index, code = line.split()
        text = _proofs_dir().joinpath(name).read_text("utf-8")
        out.append(Mutation(name, text, int(index), code))
    return out
