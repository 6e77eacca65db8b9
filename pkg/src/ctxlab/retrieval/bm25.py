"""Okapi BM25 over code chunks."""

from __future__ import annotations

import hashlib
import math
import pickle
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ctxlab.corpus import CodeEntity, LineSpan, RepoSnapshot

K1 = 1.2
B = 0.75
DEFAULT_WINDOW = 40

_CAMEL = re.compile(r"(?<=[a-z])(?=[A-Z])")
_WORD = re.compile(r"[^\W_]+")


def index_term_split(text: str) -> list[str]:
    """Lowercased terms; splits on non-alphanumerics, underscores and camelCase humps.

    >>> index_term_split("getUserName")
    ['get', 'user', 'name']
    """
    return [w.lower() for w in _WORD.findall(_CAMEL.sub(" ", text))]


@dataclass(frozen=True)
class Document:
    doc_id: str
    file: str
    span: LineSpan
    text: str


@dataclass(frozen=True)
class SearchHit:
    file: str
    span: LineSpan
    snippet: str
    provenance: str
    score: float | None = None


def build_chunks(snapshot: RepoSnapshot, entities: Iterable[CodeEntity], window: int = DEFAULT_WINDOW) -> list[Document]:
    """One document per entity plus ``window``-line slices of uncovered regions."""
    if window < 1:
        raise ValueError("window must be >= 1")
    by_file: dict[str, list[CodeEntity]] = defaultdict(list)
    for ent in entities:
        by_file[ent.file].append(ent)

    docs = []
    for f in snapshot.files:
        ents = by_file.get(f.path, [])
        for ent in ents:
            docs.append(Document(f"{f.path}:{ent.span}:{ent.qualified_name}", f.path, ent.span, f.text_at(ent.span)))

        covered = [False] * (f.line_count + 1)
        for ent in ents:
            for line in range(ent.span.start, ent.span.end + 1):
                covered[line] = True
        line = 1
        while line <= f.line_count:
            if covered[line]:
                line += 1
                continue
            run_end = line
            while run_end + 1 <= f.line_count and not covered[run_end + 1]:
                run_end += 1
            for start in range(line, run_end + 1, window):
                span = LineSpan(start, min(start + window - 1, run_end))
                docs.append(Document(f"{f.path}:{span}", f.path, span, f.text_at(span)))
            line = run_end + 1
    docs.sort(key=lambda d: (d.file.encode(), d.span.start, -d.span.end, d.doc_id))
    return docs


@dataclass
class Bm25Index:
    documents: list[Document]
    k1: float = K1
    b: float = B
    doc_lengths: list[int] = field(init=False)
    avg_doc_length: float = field(init=False)
    term_frequencies: list[Counter[str]] = field(init=False)
    document_frequencies: Counter[str] = field(init=False)
    _postings: dict[str, list[int]] = field(init=False, repr=False)
    _positions: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._positions = {}
        for i, d in enumerate(self.documents):
            if d.doc_id in self._positions:
                raise ValueError(f"duplicate doc_id {d.doc_id!r}")
            self._positions[d.doc_id] = i
        self.term_frequencies = [Counter(index_term_split(d.text)) for d in self.documents]
        self.doc_lengths = [sum(tf.values()) for tf in self.term_frequencies]
        n = len(self.documents)
        self.avg_doc_length = sum(self.doc_lengths) / n if n else 0.0
        self.document_frequencies = Counter()
        self._postings = defaultdict(list)
        for i, tf in enumerate(self.term_frequencies):
            self.document_frequencies.update(tf.keys())
            for term in tf:
                self._postings[term].append(i)

    def __len__(self) -> int:
        return len(self.documents)

    def idf(self, term: str) -> float:
        df = self.document_frequencies.get(term, 0)
        if df == 0:
            return 0.0
        return math.log(1 + (len(self.documents) - df + 0.5) / (df + 0.5))

    def _score_at(self, i: int, terms: Iterable[str]) -> float:
        tf_doc = self.term_frequencies[i]
        norm = self.k1 * (1 - self.b + self.b * self.doc_lengths[i] / self.avg_doc_length) if self.avg_doc_length else self.k1
        score = 0.0
        for term in terms:
            tf = tf_doc.get(term, 0)
            if tf:
                score += self.idf(term) * tf * (self.k1 + 1) / (tf + norm)
        return score

    def score(self, query_terms: Sequence[str], doc_id: str) -> float:
        """Raises KeyError for an unknown ``doc_id``."""
        return self._score_at(self._positions[doc_id], sorted(set(query_terms)))

    def document(self, doc_id: str) -> Document:
        return self.documents[self._positions[doc_id]]

    def search(self, query: str, top_k: int) -> list[SearchHit]:
        if top_k < 1:
            raise ValueError("top_k must be >= 1")
        terms = sorted(set(index_term_split(query)))
        candidates = {i for t in terms for i in self._postings.get(t, ())}
        scored = [(self._score_at(i, terms), i) for i in candidates]
        scored = [(s, i) for s, i in scored if s > 0]
        scored.sort(key=lambda si: (-si[0], self.documents[si[1]].doc_id))
        return [
            SearchHit(d.file, d.span, d.text, "search_bm25", s)
            for s, d in ((s, self.documents[i]) for s, i in scored[:top_k])
        ]

    # versioned on-disk cache keyed by snapshot content

    CACHE_VERSION = 1

    def save(self, path: Path | str, snapshot_hash: str) -> None:
        payload = {"version": self.CACHE_VERSION, "snapshot": snapshot_hash, "index": self}
        Path(path).write_bytes(pickle.dumps(payload, protocol=4))

    @classmethod
    def load(cls, path: Path | str, snapshot_hash: str) -> Bm25Index | None:
        """Return the cached index, or None if missing, stale or from another version."""
        try:
            payload = pickle.loads(Path(path).read_bytes())
        except (OSError, pickle.UnpicklingError, EOFError, AttributeError):
            return None
        if not isinstance(payload, dict) or payload.get("version") != cls.CACHE_VERSION or payload.get("snapshot") != snapshot_hash:
            return None
        return payload["index"]


def bm25_score(index: Bm25Index, query_terms: Sequence[str], doc_id: str) -> float:
    return index.score(query_terms, doc_id)


def search_bm25(index: Bm25Index, query: str, top_k: int) -> list[SearchHit]:
    return index.search(query, top_k)


def cache_key(snapshot: RepoSnapshot, window: int) -> str:
    return hashlib.sha256(f"{snapshot.content_hash}:{window}:{K1}:{B}".encode()).hexdigest()[:16]
