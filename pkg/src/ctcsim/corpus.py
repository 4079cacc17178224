"""The three factoring programs, shipped as ``.ctc`` files inside the package."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .dsl import Program, parse


class UnknownCorpusProgram(KeyError):
    def __str__(self) -> str:
        return f"unknown corpus program {self.args[0]!r} (known: {', '.join(IDS)})"


IDS = ("brun1", "brun2", "brun3")

TITLES = {
    "brun1": "Factoring algorithm as proposed by Brun",
    "brun2": "Modified factoring algorithm",
    "brun3": "Optimal factoring algorithm",
}

_ALG_LINE = re.compile(r"#\s*alg:(\d+)(?:-\d+)?\s*$")


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    title: str
    source: str
    paper_lines: dict[int, int]  # DSL source line -> listing line

    @property
    def program(self) -> Program:
        return _parsed(self.id)


def source_path(id: str):
    """Traversable path of the installed ``.ctc`` file."""
    if id not in IDS:
        raise UnknownCorpusProgram(id)
    return resources.files(__package__).joinpath("corpus", f"{id}.ctc")


@lru_cache(maxsize=None)
def get(id: str) -> CorpusEntry:
    source = source_path(id).read_text(encoding="utf-8")
    paper_lines = {}
    for lineno, text in enumerate(source.splitlines(), start=1):
        m = _ALG_LINE.search(text)
        if m:
            paper_lines[lineno] = int(m.group(1))
    return CorpusEntry(id, TITLES[id], source, paper_lines)


@lru_cache(maxsize=None)
def _parsed(id: str) -> Program:
    return parse(get(id).source)


def program(id: str) -> Program:
    return get(id).program


def list_entries() -> list[tuple[str, str]]:
    return [(id, TITLES[id]) for id in IDS]


def is_corpus_id(name: str) -> bool:
    return name in IDS
