"""Corpus ingestion, interning, and year-sliced citation access.

The canonical input is line-delimited JSON, one paper per line:

    {"id": "p1", "year": 2013, "authors": ["a1", "a2"], "references": ["p0"]}

``id`` is an opaque paper identifier, ``authors`` a non-empty list of
opaque author identifiers, ``references`` the papers this one cites
(optional, defaults to empty).  Malformed lines are skipped and counted;
a duplicated paper id keeps the first occurrence.  References to papers
that never appear in the corpus are "dangling": they are reported but
excluded from every distance and index computation, because the author
sets of both endpoints must be known.

Aminer/DBLP V12 records can be converted with :func:`canonical_from_dblp_v12`.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

from .config import Config
from .errors import EmptyCorpusError, IngestError


@dataclass(frozen=True)
class PaperRecord:
    """One normalized paper as parsed from the canonical format."""

    paper_id: str
    year: int
    author_ids: tuple[str, ...]
    reference_ids: tuple[str, ...]


@dataclass(frozen=True)
class CitationEvent:
    """One directed citation edge, dated by the citing paper's year."""

    cited_paper_id: str
    citing_paper_id: str
    citing_year: int
    cited_authors: frozenset[int]
    citing_authors: frozenset[int]


@dataclass
class ValidationSummary:
    papers: int = 0
    authors: int = 0
    citations: int = 0
    dangling_references: int = 0
    duplicates: int = 0
    skipped_lines: int = 0
    skipped_reasons: dict = field(default_factory=dict)

    def as_text(self) -> str:
        lines = [
            f"papers = {self.papers}",
            f"authors = {self.authors}",
            f"citations = {self.citations}",
            f"dangling_references = {self.dangling_references}",
            f"duplicates = {self.duplicates}",
            f"skipped_lines = {self.skipped_lines}",
        ]
        for reason in sorted(self.skipped_reasons):
            lines.append(f"skipped_{reason} = {self.skipped_reasons[reason]}")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "papers": self.papers,
            "authors": self.authors,
            "citations": self.citations,
            "dangling_references": self.dangling_references,
            "duplicates": self.duplicates,
            "skipped_lines": self.skipped_lines,
            "skipped_reasons": dict(sorted(self.skipped_reasons.items())),
        }


class CorpusStore:
    """Immutable interned view of a parsed corpus.

    Authors and papers get dense integer ids in first-seen order, which
    makes the store deterministic for a given input.  After construction
    the store is never mutated and is safe for concurrent reads.
    """

    def __init__(self):
        self.author_labels: list[str] = []
        self.author_index: dict[str, int] = {}
        self.paper_labels: list[str] = []
        self.paper_index: dict[str, int] = {}
        self.paper_year: list[int] = []
        self.paper_authors: list[tuple[int, ...]] = []
        self.paper_refs: list[tuple[int, ...]] = []
        self.years_index: dict[int, list[int]] = {}
        self.cited_by: list[list[int]] = []
        self.author_papers: list[list[int]] = []
        self.summary = ValidationSummary()

    # -- interning -----------------------------------------------------

    def _intern_author(self, label: str) -> int:
        idx = self.author_index.get(label)
        if idx is None:
            idx = len(self.author_labels)
            self.author_index[label] = idx
            self.author_labels.append(label)
            self.author_papers.append([])
        return idx

    # -- basic access --------------------------------------------------

    @property
    def num_papers(self) -> int:
        return len(self.paper_labels)

    @property
    def num_authors(self) -> int:
        return len(self.author_labels)

    def papers_in_year(self, year: int) -> list[int]:
        return self.years_index.get(year, [])

    def year_span(self) -> tuple[int, int]:
        years = self.years_index.keys()
        return min(years), max(years)

    def author_id(self, label: str) -> int:
        return self.author_index[label]

    def iter_citations(self, year: int) -> Iterator[tuple[int, int]]:
        """(cited paper, citing paper) pairs with citing year = ``year``."""
        for pid in self.papers_in_year(year):
            for ref in self.paper_refs[pid]:
                yield ref, pid

    def paper_citation_counts(self, up_to_year: int) -> list[int]:
        """Citations received per paper from citing years <= ``up_to_year``."""
        counts = [0] * self.num_papers
        for year, papers in self.years_index.items():
            if year > up_to_year:
                continue
            for pid in papers:
                for ref in self.paper_refs[pid]:
                    counts[ref] += 1
        return counts

    def first_pub_years(self) -> list[int]:
        """Earliest publication year per author."""
        first = [0] * self.num_authors
        for author, papers in enumerate(self.author_papers):
            first[author] = min(self.paper_year[p] for p in papers)
        return first

    # -- serialization -------------------------------------------------

    def dump(self, fp: IO[str]) -> None:
        """Write the normalized corpus back out in the canonical format.

        Dangling references are dropped (they carry no usable author
        information), so re-parsing the dump reproduces identical
        interned tables and indices.
        """
        for pid in range(self.num_papers):
            record = {
                "id": self.paper_labels[pid],
                "year": self.paper_year[pid],
                "authors": [self.author_labels[a] for a in self.paper_authors[pid]],
                "references": [self.paper_labels[r] for r in self.paper_refs[pid]],
            }
            fp.write(json.dumps(record, separators=(",", ":")) + "\n")


def _normalize_record(obj) -> PaperRecord:
    """Validate one decoded line; raises ValueError with a short reason."""
    if not isinstance(obj, dict):
        raise ValueError("not_an_object")
    paper_id = obj.get("id")
    if not isinstance(paper_id, str) or not paper_id:
        raise ValueError("bad_id")
    year = obj.get("year")
    if isinstance(year, bool) or not isinstance(year, int):
        raise ValueError("bad_year")
    authors = obj.get("authors")
    if not isinstance(authors, list) or not authors:
        raise ValueError("bad_authors")
    seen: dict[str, None] = {}
    for a in authors:
        if not isinstance(a, str) or not a:
            raise ValueError("bad_authors")
        seen.setdefault(a)
    refs = obj.get("references", [])
    if not isinstance(refs, list):
        raise ValueError("bad_references")
    kept: dict[str, None] = {}
    for r in refs:
        if not isinstance(r, str) or not r:
            raise ValueError("bad_references")
        if r != paper_id:  # self-references carry no information
            kept.setdefault(r)
    return PaperRecord(paper_id, year, tuple(seen), tuple(kept))


def parse_records(lines: Iterable[str | bytes], config: Config) -> CorpusStore:
    """Parse canonical line-delimited records into an indexed store.

    Malformed lines (bad JSON, missing fields, empty author list, year
    outside the configured range) are skipped and counted by reason.
    Duplicate paper ids keep the first occurrence.
    """
    store = CorpusStore()
    raw_refs: list[tuple[str, ...]] = []
    skipped = Counter()
    duplicates = 0

    for raw in lines:
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8", errors="replace")
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except ValueError:
            skipped["bad_json"] += 1
            continue
        try:
            rec = _normalize_record(obj)
        except ValueError as exc:
            skipped[str(exc)] += 1
            continue
        if not (config.year_start <= rec.year <= config.year_end):
            skipped["year_out_of_range"] += 1
            continue
        if rec.paper_id in store.paper_index:
            duplicates += 1
            continue

        pid = len(store.paper_labels)
        store.paper_index[rec.paper_id] = pid
        store.paper_labels.append(rec.paper_id)
        store.paper_year.append(rec.year)
        authors = tuple(store._intern_author(a) for a in rec.author_ids)
        store.paper_authors.append(authors)
        for a in authors:
            store.author_papers[a].append(pid)
        store.years_index.setdefault(rec.year, []).append(pid)
        raw_refs.append(rec.reference_ids)

    if not store.paper_labels:
        raise EmptyCorpusError("no valid paper records in input")

    # Resolve references now that the full paper table is known.
    dangling = 0
    citations = 0
    store.cited_by = [[] for _ in range(store.num_papers)]
    for pid, refs in enumerate(raw_refs):
        resolved = []
        for label in refs:
            target = store.paper_index.get(label)
            if target is None:
                dangling += 1
            else:
                resolved.append(target)
                store.cited_by[target].append(pid)
                citations += 1
        store.paper_refs.append(tuple(resolved))

    store.summary = ValidationSummary(
        papers=store.num_papers,
        authors=store.num_authors,
        citations=citations,
        dangling_references=dangling,
        duplicates=duplicates,
        skipped_lines=sum(skipped.values()),
        skipped_reasons=dict(skipped),
    )
    return store


def load_corpus(path: str | Path, config: Config) -> CorpusStore:
    try:
        with open(path, "rb") as fp:
            return parse_records(fp, config)
    except OSError as exc:
        raise IngestError(f"cannot read corpus {path}: {exc}") from exc


def yearly_counts(store: CorpusStore, years: Iterable[int]) -> list[tuple[int, int, int]]:
    """(year, papers published, citations made) for each requested year."""
    out = []
    for y in years:
        papers = store.papers_in_year(y)
        cites = sum(len(store.paper_refs[p]) for p in papers)
        out.append((y, len(papers), cites))
    return out


def citations_in_year(store: CorpusStore, year: int) -> list[CitationEvent]:
    """All resolved citation events whose citing paper was published in ``year``."""
    events = []
    for pid in store.papers_in_year(year):
        citing_authors = frozenset(store.paper_authors[pid])
        for ref in store.paper_refs[pid]:
            events.append(
                CitationEvent(
                    cited_paper_id=store.paper_labels[ref],
                    citing_paper_id=store.paper_labels[pid],
                    citing_year=year,
                    cited_authors=frozenset(store.paper_authors[ref]),
                    citing_authors=citing_authors,
                )
            )
    return events


def canonical_from_dblp_v12(obj: dict) -> dict | None:
    """Map one Aminer/DBLP V12 paper object to the canonical record shape.

    V12 stores numeric ids, ``authors`` as objects with ``id``/``name``,
    and ``references`` as numeric ids.  Returns None when the object has
    no usable id, year, or authors.
    """
    paper_id = obj.get("id")
    year = obj.get("year")
    authors = obj.get("authors") or []
    author_ids = [str(a["id"]) for a in authors if isinstance(a, dict) and a.get("id") is not None]
    if paper_id is None or year is None or not author_ids:
        return None
    return {
        "id": str(paper_id),
        "year": int(year),
        "authors": author_ids,
        "references": [str(r) for r in obj.get("references") or []],
    }
