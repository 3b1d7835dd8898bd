"""The shipped corpus of bounded formulas."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from . import sigma as S


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    status: str  # "true" or "mixed"
    text: str

    @property
    def formula(self) -> S.Formula:
        return S.parse_formula(self.text)

    @property
    def string_vars(self) -> list[str]:
        return sorted(S.free_variables(self.formula)[1])


def parse_corpus(text: str) -> list[CorpusEntry]:
    out = []
    for raw in text.splitlines():
        if not raw.strip() or raw.startswith("#"):
            continue
        name, status, body = raw.split("\t")
        if status not in ("true", "mixed"):
            raise ValueError(f"{name}: unknown status {status!r}")
        out.append(CorpusEntry(name, status, body))
    return out


def load_corpus() -> list[CorpusEntry]:
    return parse_corpus(resources.files(__package__).joinpath("data/corpus.txt").read_text("utf-8"))
